use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vqc_core::optimizer::OptimizerConfig;

#[derive(Debug, Parser)]
#[command(
    name = "vqc",
    version,
    about = "Phase estimation, variational replacement and benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Run seed.
    #[arg(long, global = true, env = "VQC_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Measurement shots (0 means exact probabilities where supported).
    #[arg(long, global = true, default_value_t = 4096)]
    pub shots: u64,
    /// Noise model: `default`, `none`, or a JSON file.
    #[arg(long, global = true)]
    pub noise: Option<String>,
    /// Output file (stdout if omitted); a directory for `bench`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for parallel training.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnvArg {
    Ideal,
    Noisy,
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = OptimizerConfig::default().rho_begin)]
    pub rho_begin: f64,
    #[arg(long, default_value_t = OptimizerConfig::default().rho_end)]
    pub rho_end: f64,
    #[arg(long, default_value_t = OptimizerConfig::default().max_evals)]
    pub max_evals: usize,
    /// Independent starts per training run.
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
}

impl OptimizerArgs {
    pub fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            rho_begin: self.rho_begin,
            rho_end: self.rho_end,
            max_evals: self.max_evals,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and simulate a phase-estimation circuit.
    Qpe {
        /// Phase in [0, 1), as a decimal or a fraction `a/b`.
        #[arg(long)]
        theta: String,
        /// Counting qubits.
        #[arg(long)]
        t: usize,
        /// Write a histogram.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the circuit as `.qc` text.
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Train an ansatz against a target distribution.
    Train {
        /// Distribution JSON, or an artifact holding one.
        target: String,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value = "full")]
        entangler: String,
        #[arg(long, value_enum, default_value_t = EnvArg::Ideal)]
        env: EnvArg,
        /// Expected target width.
        #[arg(long, default_value_t = 5)]
        qubits: usize,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        /// Keep every n-th cost value in the report.
        #[arg(long, default_value_t = 1)]
        history_stride: usize,
        /// Write the recorded cost history as CSV.
        #[arg(long)]
        history_csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Replace a measured circuit (or region) by a trained ansatz.
    Compile {
        /// Circuit in `.qc` text form.
        circuit: PathBuf,
        #[arg(long)]
        region: Option<String>,
        /// Search space such as `p=0..=5;e=linear,full`.
        #[arg(long, default_value = "")]
        grid: String,
        #[arg(long, default_value = "0..10")]
        seeds: String,
        /// Noise standing in for hardware (default: twice `--noise`).
        #[arg(long)]
        hardware_noise: Option<String>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        /// Write the compiled circuit as `.qc` text.
        #[arg(long)]
        qc: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Sweep layers, entanglers and environments over many seeds.
    Bench {
        #[arg(long, default_value = "1/3")]
        theta: String,
        #[arg(long, default_value_t = 5)]
        t: usize,
        #[arg(long, default_value = "0..=5")]
        layers: String,
        #[arg(long, default_value = "linear,full")]
        entanglers: String,
        #[arg(long, default_value = "ideal,noisy")]
        envs: String,
        #[arg(long, default_value = "0..10")]
        seeds: String,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Chi-squared of A against ground truth B.
    Chi2 { a: String, b: String },
    /// Re-run the configuration embedded in an artifact.
    Replay { artifact: String },
}
