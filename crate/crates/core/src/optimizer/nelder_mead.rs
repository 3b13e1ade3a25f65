use super::{distance, Evaluator, OptResult, OptStatus, OptimizerConfig};
use crate::error::Result;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Nelder–Mead simplex search. The initial simplex is `x0` plus
/// `rho_begin` along each axis; it stops when every vertex lies within
/// `rho_end` of the best one.
pub fn nelder_mead_minimize<F>(f: F, x0: &[f64], cfg: &OptimizerConfig) -> Result<OptResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    cfg.validate(n)?;
    let mut ev = Evaluator::new(f, cfg.max_evals);

    let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = ev.eval(x0).expect("budget validated");
    pts.push((x0.to_vec(), f0));
    for j in 0..n {
        let mut x = x0.to_vec();
        x[j] += cfg.rho_begin;
        let fx = ev.eval(&x).expect("budget validated");
        pts.push((x, fx));
    }

    let status = loop {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = pts[1..]
            .iter()
            .map(|(x, _)| distance(x, &pts[0].0))
            .fold(0.0, f64::max);
        if diameter < cfg.rho_end {
            break OptStatus::Converged;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|i| pts[..n].iter().map(|(x, _)| x[i]).sum::<f64>() / n as f64)
            .collect();
        let toward = |t: f64, target: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(target)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let worst = pts[n].clone();
        let (best_f, second_worst_f) = (pts[0].1, pts[n - 1].1);

        let xr = toward(-REFLECT, &worst.0);
        let Some(fr) = ev.eval(&xr) else {
            break OptStatus::BudgetExhausted;
        };

        if fr < best_f {
            let xe = toward(-REFLECT * EXPAND, &worst.0);
            let Some(fe) = ev.eval(&xe) else {
                pts[n] = (xr, fr);
                break OptStatus::BudgetExhausted;
            };
            pts[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < second_worst_f {
            pts[n] = (xr, fr);
            continue;
        }

        let (xc, accept_below) = if fr < worst.1 {
            (toward(-REFLECT * CONTRACT, &worst.0), fr)
        } else {
            (toward(CONTRACT, &worst.0), worst.1)
        };
        let Some(fc) = ev.eval(&xc) else {
            break OptStatus::BudgetExhausted;
        };
        let outside = fr < worst.1;
        if (outside && fc <= accept_below) || (!outside && fc < accept_below) {
            pts[n] = (xc, fc);
            continue;
        }

        let best = pts[0].0.clone();
        let mut exhausted = false;
        for (x, fx) in pts[1..].iter_mut() {
            let shrunk: Vec<f64> = best
                .iter()
                .zip(x.iter())
                .map(|(b, v)| b + SHRINK * (v - b))
                .collect();
            match ev.eval(&shrunk) {
                Some(v) => {
                    *x = shrunk;
                    *fx = v;
                }
                None => {
                    exhausted = true;
                    break;
                }
            }
        }
        if exhausted {
            break OptStatus::BudgetExhausted;
        }
    };
    Ok(ev.finish(status))
}
