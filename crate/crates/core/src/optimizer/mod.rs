//! Derivative-free minimizers over plain real vectors.
//!
//! Both methods take an objective `FnMut(&[f64]) -> f64` that must be pure
//! for the duration of a run; they never call it concurrently.

mod cobyla;
mod nelder_mead;

pub use cobyla::cobyla_minimize;
pub use nelder_mead::nelder_mead_minimize;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Initial trust-region radius (or initial simplex edge).
    pub rho_begin: f64,
    /// Final radius; the run stops once the radius reaches it.
    pub rho_end: f64,
    pub max_evals: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            rho_begin: 0.5,
            rho_end: 1e-4,
            max_evals: 2000,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self, arity: usize) -> Result<()> {
        if arity == 0 {
            return Err(Error::InvalidConfig("objective has no parameters".into()));
        }
        if !(self.rho_end > 0.0 && self.rho_end <= self.rho_begin && self.rho_begin.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < rho_end <= rho_begin, got rho_begin={} rho_end={}",
                self.rho_begin, self.rho_end
            )));
        }
        let needed = arity + 2;
        if self.max_evals < needed {
            return Err(Error::BudgetTooSmall {
                budget: self.max_evals,
                arity,
                needed,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptStatus {
    /// Radius (or simplex diameter) fell to `rho_end`.
    Converged,
    BudgetExhausted,
    /// Terminated without ever improving on the starting point.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub evals_used: usize,
    pub status: OptStatus,
}

/// Counts calls, enforces the budget and keeps the running best.
pub(crate) struct Evaluator<F> {
    f: F,
    budget: usize,
    evals: usize,
    first_f: f64,
    best_x: Vec<f64>,
    best_f: f64,
}

impl<F: FnMut(&[f64]) -> f64> Evaluator<F> {
    pub(crate) fn new(f: F, budget: usize) -> Self {
        Evaluator {
            f,
            budget,
            evals: 0,
            first_f: f64::INFINITY,
            best_x: Vec::new(),
            best_f: f64::INFINITY,
        }
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.evals >= self.budget
    }

    /// `None` once the budget is spent. NaN values are read as +inf.
    pub(crate) fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        let mut v = (self.f)(x);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        if self.evals == 0 {
            self.first_f = v;
        }
        self.evals += 1;
        if v < self.best_f || self.best_x.is_empty() {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        Some(v)
    }

    pub(crate) fn finish(self, status: OptStatus) -> OptResult {
        let status = match status {
            OptStatus::Converged if self.best_f >= self.first_f => OptStatus::Stalled,
            s => s,
        };
        OptResult {
            best_x: self.best_x,
            best_f: self.best_f,
            evals_used: self.evals,
            status,
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
