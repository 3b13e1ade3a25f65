//! Ideal and noisy simulation backends and measurement statistics.

mod density;
mod distribution;
pub(crate) mod kernel;
mod noise;
mod statevector;

pub use density::{density_matrix, DensityMatrix, MAX_DENSITY_QUBITS};
pub use distribution::{format_bitstring, parse_bitstring, Distribution};
pub use noise::NoiseModel;
pub use statevector::{statevector, StateVector};

pub(crate) use distribution::check_width;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::Circuit;
use crate::error::{Error, Result};

/// Marginal over `measured` of a full-register probability vector. The first
/// measured qubit becomes the most significant outcome bit.
pub fn marginalize(full: &[f64], measured: &[usize]) -> Vec<f64> {
    let k = measured.len();
    let mut out = vec![0.0; 1 << k];
    for (i, &p) in full.iter().enumerate() {
        let m = measured
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &q)| acc | ((i >> q & 1) << (k - 1 - j)));
        out[m] += p;
    }
    out
}

fn measured(c: &Circuit) -> Result<&[usize]> {
    match c.measured_qubits() {
        [] => Err(Error::NoMeasurement),
        qs => Ok(qs),
    }
}

/// Exact Born-rule distribution over the measured qubits.
pub fn run_ideal(c: &Circuit) -> Result<Distribution> {
    let qs = measured(c)?;
    let probs = marginalize(&statevector(c).probabilities(), qs);
    Distribution::new(qs.len(), probs)
}

/// Exact distribution under `nm`: depolarizing after each gate of `c` as
/// written, then independent readout flips on the measured bits.
pub fn run_noisy(c: &Circuit, nm: &NoiseModel) -> Result<Distribution> {
    let qs = measured(c)?;
    let dm = density_matrix(c, nm)?;
    let mut probs = marginalize(&dm.probabilities(), qs);
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(Distribution::new(qs.len(), probs)?.with_readout_error(nm.readout_p01, nm.readout_p10))
}

/// Multinomial sample of `shots` outcomes from `d`, deterministic in `seed`.
pub fn sample_shots(d: &Distribution, shots: u64, seed: u64) -> Result<Distribution> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let index =
        WeightedIndex::new(d.probs()).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let mut counts = vec![0u64; d.probs().len()];
    for _ in 0..shots {
        counts[index.sample(&mut rng)] += 1;
    }
    Distribution::from_counts(d.n_bits(), &counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn hadamard_is_fair_coin() {
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        c.set_measured(vec![0]).unwrap();
        let d = run_ideal(&c).unwrap();
        assert!((d.prob(0) - 0.5).abs() < 1e-12);
        assert!((d.prob(1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unmeasured_circuit_is_rejected() {
        assert_eq!(
            run_ideal(&Circuit::new(1)).unwrap_err(),
            Error::NoMeasurement
        );
        assert_eq!(
            run_noisy(&Circuit::new(1), &NoiseModel::default()).unwrap_err(),
            Error::NoMeasurement
        );
    }

    #[test]
    fn measurement_order_sets_bit_significance() {
        let mut c = Circuit::new(3);
        c.push(Gate::X(0)).unwrap();
        c.set_measured(vec![0, 2]).unwrap();
        assert_eq!(run_ideal(&c).unwrap().prob_of("10").unwrap(), 1.0);
        c.set_measured(vec![2, 0]).unwrap();
        assert_eq!(run_ideal(&c).unwrap().prob_of("01").unwrap(), 1.0);
    }

    #[test]
    fn full_depolarizing_after_hadamard_is_uniform() {
        // p = 1: lambda = -1/3, the X-axis Bloch vector becomes (-1/3, 0, 0),
        // whose Z-component (the only one readout sees) is still 0.
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        c.set_measured(vec![0]).unwrap();
        let nm = NoiseModel::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let d = run_noisy(&c, &nm).unwrap();
        assert!((d.prob(0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn readout_error_on_idle_qubit() {
        let mut c = Circuit::new(1);
        c.set_measured(vec![0]).unwrap();
        let nm = NoiseModel::new(0.0, 0.0, 0.02, 0.02).unwrap();
        let d = run_noisy(&c, &nm).unwrap();
        assert!((d.prob(0) - 0.98).abs() < 1e-12);
        assert!((d.prob(1) - 0.02).abs() < 1e-12);
    }

    #[test]
    fn sampling_contracts() {
        assert_eq!(
            sample_shots(&Distribution::point_mass(2, 1), 0, 1).unwrap_err(),
            Error::ZeroShots
        );
        let point = sample_shots(&Distribution::point_mass(3, 5), 4096, 11).unwrap();
        assert_eq!(point.prob(5), 1.0);
        assert_eq!(point.shots(), Some(4096));

        let coin = Distribution::new(1, vec![0.5, 0.5]).unwrap();
        let a = sample_shots(&coin, 4096, 7).unwrap();
        let b = sample_shots(&coin, 4096, 7).unwrap();
        assert_eq!(a, b);
        let sigma = 0.5 / (4096f64).sqrt();
        assert!((a.prob(0) - 0.5).abs() < 4.0 * sigma);
        assert_ne!(a, sample_shots(&coin, 4096, 8).unwrap());
    }
}
