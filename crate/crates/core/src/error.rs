use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit circuit")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("line {line}: malformed angle `{token}`")]
    MalformedAngle { line: usize, token: String },

    #[error("region `{0}` is never closed")]
    UnclosedRegion(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("circuit has {n_qubits} qubits, density-matrix simulation is capped at {cap}")]
    TooManyQubits { n_qubits: usize, cap: usize },

    #[error("circuit declares no measured qubits")]
    NoMeasurement,

    #[error("bit-width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("invalid probability `{name}` = {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    InvalidEpsilon(f64),

    #[error("phase must lie in [0, 1), got {0}")]
    InvalidPhase(f64),

    #[error("invalid bitstring `{0}`")]
    InvalidBitstring(String),

    #[error("expected {expected} parameters, got {got}")]
    ParamLength { expected: usize, got: usize },

    #[error(
        "evaluation budget {budget} is too small for {arity} parameters (need at least {needed})"
    )]
    BudgetTooSmall {
        budget: usize,
        arity: usize,
        needed: usize,
    },

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown region `{0}`")]
    UnknownRegion(String),

    #[error("region `{0}` covers no gates")]
    EmptyRegion(String),

    #[error("qubit mapping conflict: {0}")]
    MappingConflict(String),

    #[error("invalid compile request: {0}")]
    InvalidRequest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
