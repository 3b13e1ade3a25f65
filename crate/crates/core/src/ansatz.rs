//! Layered RY/RZ + CX ansatz, distribution metrics, and training.

use std::f64::consts::TAU;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{decompose_to_basis, emit_circuit, Circuit, Gate};
use crate::error::{Error, Result};
use crate::optimizer::{cobyla_minimize, OptStatus, OptimizerConfig};
use crate::sim::{check_width, run_ideal, run_noisy, sample_shots, Distribution, NoiseModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    None,
    Linear,
    Full,
}

impl Entangler {
    pub fn name(self) -> &'static str {
        match self {
            Entangler::None => "none",
            Entangler::Linear => "linear",
            Entangler::Full => "full",
        }
    }

    /// CX pairs of one entangling block on `n` qubits.
    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            Entangler::None => Vec::new(),
            Entangler::Linear => (0..n.saturating_sub(1)).map(|q| (q, q + 1)).collect(),
            Entangler::Full => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
        }
    }
}

impl std::str::FromStr for Entangler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Entangler::None),
            "linear" => Ok(Entangler::Linear),
            "full" => Ok(Entangler::Full),
            other => Err(Error::InvalidRequest(format!(
                "unknown entangler `{other}`"
            ))),
        }
    }
}

/// `layers` entangler blocks, each followed by a rotation layer, after an
/// initial rotation layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub layers: usize,
    pub entangler: Entangler,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, layers: usize, entangler: Entangler) -> Self {
        AnsatzSpec {
            n_qubits,
            layers,
            entangler,
        }
    }

    /// With zero layers there is nothing to entangle.
    pub fn effective_entangler(&self) -> Entangler {
        if self.layers == 0 {
            Entangler::None
        } else {
            self.entangler
        }
    }

    pub fn param_count(&self) -> usize {
        2 * self.n_qubits * (self.layers + 1)
    }

    pub fn normalized(&self) -> AnsatzSpec {
        AnsatzSpec {
            entangler: self.effective_entangler(),
            ..*self
        }
    }
}

impl fmt::Display for AnsatzSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "VQC({}, {})",
            self.layers,
            self.effective_entangler().name()
        )
    }
}

/// Rotation layers consume parameters qubit by qubit, RY before RZ.
pub fn build_ansatz(spec: &AnsatzSpec, params: &[f64]) -> Result<Circuit> {
    let expected = spec.param_count();
    if params.len() != expected {
        return Err(Error::ParamLength {
            expected,
            got: params.len(),
        });
    }
    if spec.n_qubits == 0 {
        return Err(Error::InvalidCircuit(
            "ansatz needs at least one qubit".into(),
        ));
    }
    let n = spec.n_qubits;
    let pairs = spec.effective_entangler().pairs(n);
    let mut c = Circuit::new(n);
    let mut angles = params.chunks_exact(2);
    for layer in 0..=spec.layers {
        if layer > 0 {
            c.extend(pairs.iter().map(|&(a, b)| Gate::Cx(a, b)))?;
        }
        for q in 0..n {
            let pair = angles.next().expect("length checked");
            c.push(Gate::Ry(pair[0], q))?;
            c.push(Gate::Rz(pair[1], q))?;
        }
    }
    c.set_measured((0..n).collect())?;
    Ok(c)
}

/// Sum of absolute bin differences; twice the total-variation distance.
pub fn cost(p: &Distribution, gt: &Distribution) -> Result<f64> {
    check_width(p, gt)?;
    Ok(p.probs()
        .iter()
        .zip(gt.probs())
        .map(|(a, b)| (a - b).abs())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquared {
    /// `sum (P - Pgt)^2 / Pgt` over bins where `Pgt > 0`.
    pub value: f64,
    /// Mass `P` places on bins where `Pgt = 0`.
    pub leakage: f64,
}

pub fn chi_squared(p: &Distribution, gt: &Distribution) -> Result<ChiSquared> {
    check_width(p, gt)?;
    let mut out = ChiSquared {
        value: 0.0,
        leakage: 0.0,
    };
    for (&a, &b) in p.probs().iter().zip(gt.probs()) {
        if b > 0.0 {
            out.value += (a - b) * (a - b) / b;
        } else {
            out.leakage += a;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Environment {
    Ideal,
    Noisy { noise: NoiseModel },
}

impl Environment {
    pub fn simulate(&self, c: &Circuit) -> Result<Distribution> {
        match self {
            Environment::Ideal => run_ideal(c),
            Environment::Noisy { noise } => run_noisy(c, noise),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Environment::Ideal => "ideal",
            Environment::Noisy { .. } => "noisy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub optimizer: OptimizerConfig,
    /// Independent starts per run; the best final cost wins.
    pub restarts: usize,
    /// Shots drawn when scoring the trained circuit.
    pub eval_shots: u64,
    /// Noise used for the noisy score when training in the ideal environment.
    pub eval_noise: NoiseModel,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            optimizer: OptimizerConfig::default(),
            restarts: 1,
            eval_shots: 4096,
            eval_noise: NoiseModel::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub spec: AnsatzSpec,
    pub environment: Environment,
    pub seed: u64,
    pub status: OptStatus,
    pub best_params: Vec<f64>,
    pub initial_cost: f64,
    pub final_cost: f64,
    /// Objective value of every evaluation, in call order.
    pub cost_history: Vec<f64>,
    pub evaluations: usize,
    pub chi2_ideal_eval: f64,
    pub leakage_ideal_eval: f64,
    pub chi2_noisy_eval: f64,
    pub leakage_noisy_eval: f64,
    pub basis_depth: usize,
    /// Trained circuit in `.qc` text form.
    pub circuit: String,
    pub wall_time: f64,
}

impl TrainReport {
    pub fn improved(&self) -> bool {
        self.final_cost < self.initial_cost
    }

    pub fn trained_circuit(&self) -> Result<Circuit> {
        build_ansatz(&self.spec, &self.best_params)
    }
}

// Offsets separating the evaluation sampling streams from the init stream.
pub(crate) const IDEAL_EVAL_STREAM: u64 = 0x1d8e_4e27_c47d_124f;
pub(crate) const NOISY_EVAL_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// Fits the ansatz to `gt` by minimizing [`cost`] on exact simulated
/// probabilities, then scores the result with `eval_shots` sampled shots in
/// both the ideal and a noisy environment.
pub fn train(
    spec: &AnsatzSpec,
    gt: &Distribution,
    env: &Environment,
    opts: &TrainOptions,
    seed: u64,
) -> Result<TrainReport> {
    if gt.n_bits() != spec.n_qubits {
        return Err(Error::WidthMismatch {
            left: spec.n_qubits,
            right: gt.n_bits(),
        });
    }
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut history = Vec::new();
    let mut best: Option<(Vec<f64>, f64, OptStatus)> = None;
    let mut initial_cost = f64::NAN;

    for _ in 0..opts.restarts.max(1) {
        let x0: Vec<f64> = (0..spec.param_count())
            .map(|_| rng.random_range(0.0..TAU))
            .collect();
        let objective = |x: &[f64]| -> f64 {
            let value = build_ansatz(spec, x)
                .and_then(|c| env.simulate(&c))
                .and_then(|d| cost(&d, gt))
                .unwrap_or(f64::INFINITY);
            history.push(value);
            value
        };
        let r = cobyla_minimize(objective, &x0, &opts.optimizer)?;
        if initial_cost.is_nan() {
            initial_cost = history[0];
        }
        if best.as_ref().is_none_or(|(_, f, _)| r.best_f < *f) {
            best = Some((r.best_x, r.best_f, r.status));
        }
    }
    let (best_params, final_cost, status) = best.expect("at least one start");

    let circuit = build_ansatz(spec, &best_params)?;
    let shots = opts.eval_shots;
    let ideal = sample_shots(&run_ideal(&circuit)?, shots, seed ^ IDEAL_EVAL_STREAM)?;
    let chi_ideal = chi_squared(&ideal, gt)?;
    let eval_noise = match env {
        Environment::Noisy { noise } => *noise,
        Environment::Ideal => opts.eval_noise,
    };
    let noisy = sample_shots(
        &run_noisy(&circuit, &eval_noise)?,
        shots,
        seed ^ NOISY_EVAL_STREAM,
    )?;
    let chi_noisy = chi_squared(&noisy, gt)?;

    Ok(TrainReport {
        spec: *spec,
        environment: *env,
        seed,
        status,
        basis_depth: decompose_to_basis(&circuit).depth(),
        circuit: emit_circuit(&circuit),
        best_params,
        initial_cost,
        final_cost,
        evaluations: history.len(),
        cost_history: history,
        chi2_ideal_eval: chi_ideal.value,
        leakage_ideal_eval: chi_ideal.leakage,
        chi2_noisy_eval: chi_noisy.value,
        leakage_noisy_eval: chi_noisy.leakage,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// Trains one run per seed, in parallel; reports come back in seed order.
pub fn train_seeds(
    spec: &AnsatzSpec,
    gt: &Distribution,
    env: &Environment,
    opts: &TrainOptions,
    seeds: &[u64],
) -> Result<Vec<TrainReport>> {
    seeds
        .par_iter()
        .map(|&s| train(spec, gt, env, opts, s))
        .collect()
}

/// Median and interquartile range (linear interpolation between order
/// statistics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        assert!(!values.is_empty(), "summary of no values");
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Summary {
            median: q(0.5),
            q1: q(0.25),
            q3: q(0.75),
        }
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}
