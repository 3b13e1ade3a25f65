use num_complex::Complex64;

use super::kernel::apply_gate;
use super::noise::NoiseModel;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

/// Largest register the density-matrix backend accepts.
pub const MAX_DENSITY_QUBITS: usize = 10;

/// Mixed state stored row-major; entry `(r, c)` lives at flat index
/// `(r << n) | c`, so row qubit `k` is bit `k + n` and column qubit `k` is
/// bit `k`. Conjugation `U rho U^dag` is then `U` on the high bits and `U*`
/// on the low bits of one `4^n` vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    rho: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits,
                cap: MAX_DENSITY_QUBITS,
            });
        }
        let mut rho = vec![Complex64::new(0.0, 0.0); 1 << (2 * n_qubits)];
        rho[0] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { n_qubits, rho })
    }

    /// `|psi><psi|` for an arbitrary pure state.
    pub fn from_pure(amps: &[Complex64]) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        let mut dm = Self::zero(n)?;
        let dim = amps.len();
        for r in 0..dim {
            for c in 0..dim {
                dm.rho[(r << n) | c] = amps[r] * amps[c].conj();
            }
        }
        Ok(dm)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.rho[(row << self.n_qubits) | col]
    }

    pub fn apply(&mut self, gate: &Gate) {
        apply_gate(&mut self.rho, gate, self.n_qubits, false);
        apply_gate(&mut self.rho, gate, 0, true);
    }

    /// Depolarizing channel on `qubits` in Pauli-twirl form,
    /// `(1-p) rho + p/(d^2-1) * sum_{P != I} P rho P`, `d = 2^k`.
    ///
    /// Evaluated through the equivalent replacement form
    /// `lambda rho + (1-lambda) I/d (x) Tr_qubits(rho)` with
    /// `lambda = 1 - p d^2/(d^2-1)`.
    pub fn depolarize(&mut self, qubits: &[usize], p: f64) {
        if p == 0.0 || qubits.is_empty() {
            return;
        }
        let n = self.n_qubits;
        let d = 1usize << qubits.len();
        let d2 = (d * d) as f64;
        let lambda = 1.0 - p * d2 / (d2 - 1.0);
        let mix = (1.0 - lambda) / d as f64;

        // spread(k) puts the bits of k onto the column bits of `qubits`;
        // shifting by n moves them to the row bits.
        let spread = |k: usize| -> usize {
            qubits
                .iter()
                .enumerate()
                .filter(|(i, _)| k >> i & 1 == 1)
                .map(|(_, &q)| 1usize << q)
                .sum()
        };
        let offsets: Vec<usize> = (0..d).map(spread).collect();
        let col_mask: usize = offsets[d - 1];
        let mask = col_mask | (col_mask << n);

        for base in 0..self.rho.len() {
            if base & mask != 0 {
                continue;
            }
            let trace: Complex64 = offsets.iter().map(|&o| self.rho[base | (o << n) | o]).sum();
            for (a, &oa) in offsets.iter().enumerate() {
                for (b, &ob) in offsets.iter().enumerate() {
                    let idx = base | (oa << n) | ob;
                    self.rho[idx] *= lambda;
                    if a == b {
                        self.rho[idx] += trace * mix;
                    }
                }
            }
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        // rho Hermitian => Tr(rho^2) = sum |rho_ij|^2
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_hermitian_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Diagonal of `rho`, clamped at zero.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.get(i, i).re.max(0.0))
            .collect()
    }

    /// Bloch vector `(x, y, z)` of a single-qubit state.
    pub fn bloch_vector(&self) -> Option<[f64; 3]> {
        if self.n_qubits != 1 {
            return None;
        }
        let r01 = self.get(0, 1);
        Some([
            2.0 * r01.re,
            -2.0 * r01.im,
            (self.get(0, 0) - self.get(1, 1)).re,
        ])
    }
}

/// Evolves `|0...0><0...0|` through `c`, depolarizing after every gate.
/// Readout error is not part of the state; see `run_noisy`.
pub fn density_matrix(c: &Circuit, nm: &NoiseModel) -> Result<DensityMatrix> {
    let mut dm = DensityMatrix::zero(c.n_qubits())?;
    for g in c.gates() {
        dm.apply(g);
        let p = if g.is_two_qubit() { nm.p2 } else { nm.p1 };
        dm.depolarize(&g.qubits(), p);
    }
    Ok(dm)
}
