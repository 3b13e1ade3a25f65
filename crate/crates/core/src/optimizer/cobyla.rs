//! Unconstrained COBYLA: linear interpolation on a simplex of `n + 1`
//! points, steps to the model minimizer on the trust-region boundary, and
//! simplex geometry repair in Powell's style.
//!
//! Two radii are kept. `rho` is the resolution, only ever halved down to
//! `rho_end`; `delta >= rho` is the trust radius of the current step, halved
//! after a poor step and doubled after a very good one.

use nalgebra::{DMatrix, DVector};

use super::{distance, norm, Evaluator, OptResult, OptStatus, OptimizerConfig};
use crate::error::Result;

// Powell's simplex acceptability constants.
const ALPHA: f64 = 0.25;
const BETA: f64 = 2.1;
const GAMMA: f64 = 0.5;
const DELTA: f64 = 1.1;
/// A trial step must realise this fraction of the predicted reduction.
const MIN_RATIO: f64 = 0.1;
/// Above this ratio the trust radius grows.
const GOOD_RATIO: f64 = 0.7;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Trace {
    pub initial_evals: usize,
    pub trial_steps: usize,
    pub geometry_steps: usize,
    pub repair_evals: usize,
}

struct Simplex {
    verts: Vec<Vec<f64>>,
    fvals: Vec<f64>,
}

struct Model {
    /// Rows are the dual basis of the edges `v_j - v_0`, `j = 1..=n`.
    inverse: DMatrix<f64>,
    gradient: DVector<f64>,
    /// Distance of vertex `j` from the opposite face.
    vsig: Vec<f64>,
    /// Distance of vertex `j` from the best vertex.
    veta: Vec<f64>,
}

impl Simplex {
    fn n(&self) -> usize {
        self.verts.len() - 1
    }

    fn put_best_first(&mut self) {
        let best = (0..self.fvals.len())
            .min_by(|&a, &b| self.fvals[a].total_cmp(&self.fvals[b]))
            .expect("non-empty simplex");
        self.verts.swap(0, best);
        self.fvals.swap(0, best);
    }

    fn model(&self) -> Option<Model> {
        let n = self.n();
        let edges = DMatrix::from_fn(n, n, |i, j| self.verts[j + 1][i] - self.verts[0][i]);
        let inverse = edges.clone().lu().try_inverse()?;
        if inverse.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let df = DVector::from_fn(n, |j, _| self.fvals[j + 1] - self.fvals[0]);
        let gradient = inverse.transpose() * df;
        if gradient.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let vsig = (0..n).map(|j| 1.0 / inverse.row(j).norm()).collect();
        let veta = (0..n).map(|j| edges.column(j).norm()).collect();
        Some(Model {
            inverse,
            gradient,
            vsig,
            veta,
        })
    }
}

pub fn cobyla_minimize<F>(f: F, x0: &[f64], cfg: &OptimizerConfig) -> Result<OptResult>
where
    F: FnMut(&[f64]) -> f64,
{
    cobyla_traced(f, x0, cfg).map(|(r, _)| r)
}

pub(crate) fn cobyla_traced<F>(
    f: F,
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<(OptResult, Trace)>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    cfg.validate(n)?;
    let mut ev = Evaluator::new(f, cfg.max_evals);
    let mut trace = Trace::default();
    let mut rho = cfg.rho_begin;
    let mut delta = rho;

    let mut simplex = Simplex {
        verts: Vec::with_capacity(n + 1),
        fvals: Vec::with_capacity(n + 1),
    };
    let f0 = ev.eval(x0).expect("budget validated");
    simplex.verts.push(x0.to_vec());
    simplex.fvals.push(f0);
    for j in 0..n {
        let mut x = x0.to_vec();
        x[j] += rho;
        let fx = ev.eval(&x).expect("budget validated");
        simplex.verts.push(x);
        simplex.fvals.push(fx);
    }
    trace.initial_evals = n + 1;

    let mut reduce_next = false;
    let mut repair_next = false;
    let status = loop {
        simplex.put_best_first();
        let Some(model) = simplex.model() else {
            // Degenerate simplex: rebuild the coordinate simplex around the best point.
            let base = simplex.verts[0].clone();
            for j in 0..n {
                let mut x = base.clone();
                x[j] += rho;
                let Some(fx) = ev.eval(&x) else {
                    break;
                };
                trace.repair_evals += 1;
                simplex.verts[j + 1] = x;
                simplex.fvals[j + 1] = fx;
            }
            if ev.exhausted() {
                break OptStatus::BudgetExhausted;
            }
            continue;
        };

        let acceptable = model.vsig.iter().all(|&s| s >= ALPHA * delta)
            && model.veta.iter().all(|&e| e <= BETA * delta);

        if repair_next {
            repair_next = false;
            if !acceptable {
                if ev.exhausted() {
                    break OptStatus::BudgetExhausted;
                }
                improve_geometry(&mut simplex, &model, delta, &mut ev);
                trace.geometry_steps += 1;
                continue;
            }
        }

        if reduce_next {
            if !acceptable {
                if ev.exhausted() {
                    break OptStatus::BudgetExhausted;
                }
                improve_geometry(&mut simplex, &model, delta, &mut ev);
                trace.geometry_steps += 1;
                reduce_next = false;
                continue;
            }
            if rho <= cfg.rho_end {
                break OptStatus::Converged;
            }

            rho *= 0.5;
            if rho <= 1.5 * cfg.rho_end {
                rho = cfg.rho_end;
            }
            delta = (0.5 * delta).max(rho);
            reduce_next = false;
            continue;
        }

        let gnorm = model.gradient.norm();
        if gnorm == 0.0 {
            reduce_next = true;
            continue;
        }
        let step: Vec<f64> = model.gradient.iter().map(|g| -delta * g / gnorm).collect();
        let trial: Vec<f64> = simplex.verts[0]
            .iter()
            .zip(&step)
            .map(|(x, d)| x + d)
            .collect();
        let Some(ft) = ev.eval(&trial) else {
            break OptStatus::BudgetExhausted;
        };
        trace.trial_steps += 1;

        let predicted = delta * gnorm;
        let ratio = (simplex.fvals[0] - ft) / predicted;

        // Replace the vertex whose removal best preserves the simplex volume,
        // favouring far vertices. A non-improving trial point only enters if it
        // strictly helps the geometry.
        let coords = &model.inverse * DVector::from_column_slice(&step);
        let mut best_score = if ft < simplex.fvals[0] { 0.0 } else { 1.0 };
        let mut replace = None;
        for j in 0..n {
            let dist = distance(&simplex.verts[j + 1], &trial);
            let score = coords[j].abs() * (dist / (DELTA * delta)).max(1.0);
            if score > best_score {
                best_score = score;
                replace = Some(j + 1);
            }
        }
        if let Some(l) = replace {
            simplex.verts[l] = trial;
            simplex.fvals[l] = ft;
        }
        // Only a step that does not decrease f at all, taken at the finest
        // radius for this resolution from a well-shaped simplex, moves rho.
        // From a poorly shaped simplex the geometry is repaired first.
        let failed = ft >= simplex.fvals[0] && delta <= rho;
        reduce_next = failed && acceptable;
        repair_next = failed && !acceptable;
        delta = if ratio < MIN_RATIO {
            0.5 * delta
        } else if ratio <= GOOD_RATIO {
            delta
        } else {
            2.0 * delta
        };
        if delta <= 1.5 * rho {
            delta = rho;
        }
    };
    Ok((ev.finish(status), trace))
}

/// Moves the worst-shaped vertex to `gamma * radius` from the best vertex,
/// along the normal of its opposite face, on the side the model prefers.
fn improve_geometry<F: FnMut(&[f64]) -> f64>(
    simplex: &mut Simplex,
    model: &Model,
    radius: f64,
    ev: &mut Evaluator<F>,
) {
    let n = simplex.n();
    let far = (0..n).max_by(|&a, &b| model.veta[a].total_cmp(&model.veta[b]));
    let l = match far {
        Some(j) if model.veta[j] > BETA * radius => j,
        _ => (0..n)
            .min_by(|&a, &b| model.vsig[a].total_cmp(&model.vsig[b]))
            .expect("n >= 1"),
    };
    let normal: Vec<f64> = model.inverse.row(l).iter().copied().collect();
    let len = norm(&normal);
    let slope: f64 = normal
        .iter()
        .zip(model.gradient.iter())
        .map(|(a, g)| a * g)
        .sum();
    let sign = if slope > 0.0 { -1.0 } else { 1.0 };
    let x: Vec<f64> = simplex.verts[0]
        .iter()
        .zip(&normal)
        .map(|(v, d)| v + sign * GAMMA * radius * d / len)
        .collect();
    if let Some(fx) = ev.eval(&x) {
        simplex.verts[l + 1] = x;
        simplex.fvals[l + 1] = fx;
    }
}
