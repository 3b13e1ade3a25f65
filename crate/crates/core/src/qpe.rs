//! Phase estimation for the diagonal unitary `diag(1, e^{2 pi i theta})`.
//!
//! Register layout: counting qubits `0..t` (qubit `k` has weight `2^k`),
//! storage qubit `t` prepared in the eigenstate `|1>`. The counting register
//! is measured most-significant-first, so printed bitstrings read as the
//! binary fraction of the estimate.

use std::f64::consts::{PI, TAU};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::sim::{format_bitstring, parse_bitstring, Distribution};

/// Region name given to the phase-estimation gates.
pub const QPE_REGION: &str = "qpe";

/// Largest counting register for which the closed form is tabulated.
pub const MAX_ANALYTIC_BITS: usize = 20;

/// The eigenphase `theta` in `U|1> = e^{2 pi i theta}|1>`, a fraction of a turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpec(f64);

impl PhaseSpec {
    pub fn new(theta: f64) -> Result<Self> {
        if (0.0..1.0).contains(&theta) {
            Ok(PhaseSpec(theta))
        } else {
            Err(Error::InvalidPhase(theta))
        }
    }

    pub fn theta(self) -> f64 {
        self.0
    }

    /// Angle of the controlled phase applied by counting qubit `k`,
    /// `2 pi theta 2^k` reduced into `[0, 2 pi)`.
    pub fn controlled_power_angle(self, k: usize) -> f64 {
        // Reduce the turn fraction before scaling so large k stays exact.
        let turns = (self.0 * 2f64.powi(k as i32)).rem_euclid(1.0);
        TAU * turns
    }
}

/// Counting-register size needed for `n` correct binary digits with failure
/// probability at most `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionSpec {
    pub n: usize,
    pub epsilon: f64,
    pub t: usize,
}

impl PrecisionSpec {
    pub fn new(n: usize, epsilon: f64) -> Result<Self> {
        let t = precision_qubits(n, epsilon)?;
        Ok(PrecisionSpec { n, epsilon, t })
    }
}

/// `t = n + ceil(log2(2 + 1/(2 epsilon)))`.
pub fn precision_qubits(n: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let extra = (2.0 + 1.0 / (2.0 * epsilon)).log2().ceil();
    Ok(n + extra as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpeInstance {
    pub phase: PhaseSpec,
    pub t: usize,
    pub circuit: Circuit,
}

impl QpeInstance {
    pub fn storage_qubit(&self) -> usize {
        self.t
    }
}

/// Inverse QFT over `qubits`, where `qubits[i]` carries weight `2^i`.
/// The bit-reversal swaps come first, then H and controlled phases of
/// `-pi/2^j`.
pub fn build_iqft(qubits: &[usize]) -> Vec<Gate> {
    let n = qubits.len();
    let mut gates = Vec::with_capacity(n / 2 + n * (n + 1) / 2);
    for i in 0..n / 2 {
        gates.push(Gate::Swap(qubits[i], qubits[n - 1 - i]));
    }
    for j in 0..n {
        for k in 0..j {
            let angle = -PI / 2f64.powi((j - k) as i32);
            gates.push(Gate::Cp(angle, qubits[k], qubits[j]));
        }
        gates.push(Gate::H(qubits[j]));
    }
    gates
}

/// Forward QFT: the adjoint of [`build_iqft`].
pub fn build_qft(qubits: &[usize]) -> Vec<Gate> {
    build_iqft(qubits)
        .into_iter()
        .rev()
        .map(|g| match g {
            Gate::Cp(a, c, t) => Gate::Cp(-a, c, t),
            other => other,
        })
        .collect()
}

pub fn build_qpe(phase: PhaseSpec, t: usize) -> Result<QpeInstance> {
    if t == 0 {
        return Err(Error::InvalidCircuit(
            "phase estimation needs at least one counting qubit".into(),
        ));
    }
    let storage = t;
    let counting: Vec<usize> = (0..t).collect();
    let mut circuit = Circuit::new(t + 1);
    circuit.with_region(QPE_REGION, |c| {
        c.push(Gate::X(storage))?;
        for &q in &counting {
            c.push(Gate::H(q))?;
        }
        for &k in &counting {
            c.push(Gate::Cp(phase.controlled_power_angle(k), k, storage))?;
        }
        c.extend(build_iqft(&counting))?;
        Ok(())
    })?;
    circuit.set_measured(counting.iter().rev().copied().collect())?;
    Ok(QpeInstance { phase, t, circuit })
}

/// Closed-form outcome distribution of the ideal circuit:
/// `P(m) = sin^2(2^t pi d) / (4^t sin^2(pi d))`, `d = theta - m/2^t`,
/// with `P(m) = 1` when `d` is an integer.
pub fn analytic_qpe_distribution(phase: PhaseSpec, t: usize) -> Result<Distribution> {
    if t == 0 || t > MAX_ANALYTIC_BITS {
        return Err(Error::InvalidDistribution(format!(
            "counting register of {t} bits is outside 1..={MAX_ANALYTIC_BITS}"
        )));
    }
    let size = 1usize << t;
    let scale = size as f64;
    let probs = (0..size)
        .map(|m| {
            let delta = phase.theta() - m as f64 / scale;
            let denom = (PI * delta).sin();
            if denom.abs() < 1e-12 {
                1.0
            } else {
                let num = (scale * PI * delta).sin();
                (num * num) / (scale * scale * denom * denom)
            }
        })
        .collect();
    Distribution::new(t, probs)
}

/// `m / 2^t` for the MSB-first bitstring of width `t`.
pub fn phase_estimate(bitstring: &str) -> Result<f64> {
    let m = parse_bitstring(bitstring, bitstring.len())?;
    Ok(m as f64 / 2f64.powi(bitstring.len() as i32))
}

/// Most likely readout of the exact distribution and its phase estimate.
pub fn most_likely(d: &Distribution) -> (String, f64) {
    let m = d.argmax();
    (
        format_bitstring(m, d.n_bits()),
        m as f64 / 2f64.powi(d.n_bits() as i32),
    )
}
