use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-9;

/// Probability mass over `n_bits`-wide outcomes.
///
/// Outcome `m` is printed MSB-first: bit `k` of `m` (weight `2^k`) is the
/// `(n_bits - 1 - k)`-th character, so the last measured qubit is the least
/// significant bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionFile", into = "DistributionFile")]
pub struct Distribution {
    n_bits: usize,
    probs: Vec<f64>,
    shots: Option<u64>,
}

impl Distribution {
    /// Exact distribution from a dense vector of `2^n_bits` probabilities.
    /// Rounding residue below 1e-12 is clamped to zero.
    pub fn new(n_bits: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << n_bits {
            return Err(Error::InvalidDistribution(format!(
                "{} bins for {} bits",
                probs.len(),
                n_bits
            )));
        }
        let mut probs = probs;
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -1e-12 || *p > 1.0 + 1e-12 {
                return Err(Error::InvalidDistribution(format!("probability {p}")));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("total mass {sum}")));
        }
        Ok(Distribution {
            n_bits,
            probs,
            shots: None,
        })
    }

    pub fn from_counts(n_bits: usize, counts: &[u64]) -> Result<Self> {
        let shots: u64 = counts.iter().sum();
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let probs = counts.iter().map(|&k| k as f64 / shots as f64).collect();
        let mut d = Self::new(n_bits, probs)?;
        d.shots = Some(shots);
        Ok(d)
    }

    pub fn point_mass(n_bits: usize, outcome: usize) -> Self {
        let mut probs = vec![0.0; 1 << n_bits];
        probs[outcome] = 1.0;
        Distribution {
            n_bits,
            probs,
            shots: None,
        }
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    pub fn prob(&self, outcome: usize) -> f64 {
        self.probs[outcome]
    }

    pub fn prob_of(&self, bitstring: &str) -> Result<f64> {
        Ok(self.probs[parse_bitstring(bitstring, self.n_bits)?])
    }

    /// Integer counts when the distribution was sampled.
    pub fn counts(&self) -> Option<Vec<u64>> {
        let shots = self.shots?;
        Some(
            self.probs
                .iter()
                .map(|p| (p * shots as f64).round() as u64)
                .collect(),
        )
    }

    pub fn bitstring(&self, outcome: usize) -> String {
        format_bitstring(outcome, self.n_bits)
    }

    /// Most likely outcome; the lowest index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    pub fn total_variation(&self, other: &Distribution) -> Result<f64> {
        check_width(self, other)?;
        Ok(0.5
            * self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    /// Independent per-bit readout flips: a true 0 reads as 1 with
    /// probability `p01`, a true 1 reads as 0 with probability `p10`.
    pub fn with_readout_error(&self, p01: f64, p10: f64) -> Distribution {
        let mut probs = self.probs.clone();
        if p01 != 0.0 || p10 != 0.0 {
            for bit in 0..self.n_bits {
                let m = 1usize << bit;
                for i in 0..probs.len() {
                    if i & m == 0 {
                        let (zero, one) = (probs[i], probs[i | m]);
                        probs[i] = (1.0 - p01) * zero + p10 * one;
                        probs[i | m] = p01 * zero + (1.0 - p10) * one;
                    }
                }
            }
        }
        Distribution {
            n_bits: self.n_bits,
            probs,
            shots: None,
        }
    }
}

pub(crate) fn check_width(a: &Distribution, b: &Distribution) -> Result<()> {
    if a.n_bits != b.n_bits {
        return Err(Error::WidthMismatch {
            left: a.n_bits,
            right: b.n_bits,
        });
    }
    Ok(())
}

pub fn format_bitstring(outcome: usize, n_bits: usize) -> String {
    (0..n_bits)
        .rev()
        .map(|k| if outcome >> k & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// MSB-first bitstring to integer; the width must equal `n_bits`.
pub fn parse_bitstring(s: &str, n_bits: usize) -> Result<usize> {
    if s.len() != n_bits || n_bits >= usize::BITS as usize {
        return Err(Error::InvalidBitstring(s.to_string()));
    }
    s.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok(acc << 1 | 1),
        _ => Err(Error::InvalidBitstring(s.to_string())),
    })
}

/// On-disk form: `{"n_bits": 5, "shots": 4096|null, "probs": {"01011": 0.684, ...}}`.
#[derive(Serialize, Deserialize)]
struct DistributionFile {
    n_bits: usize,
    shots: Option<u64>,
    probs: BTreeMap<String, f64>,
}

impl From<Distribution> for DistributionFile {
    fn from(d: Distribution) -> Self {
        let probs = d
            .probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (format_bitstring(i, d.n_bits), p))
            .collect();
        DistributionFile {
            n_bits: d.n_bits,
            shots: d.shots,
            probs,
        }
    }
}

impl TryFrom<DistributionFile> for Distribution {
    type Error = Error;

    fn try_from(f: DistributionFile) -> Result<Self> {
        if f.n_bits > 24 {
            return Err(Error::InvalidDistribution(format!(
                "{} bits is too wide",
                f.n_bits
            )));
        }
        let mut probs = vec![0.0; 1 << f.n_bits];
        for (key, p) in &f.probs {
            probs[parse_bitstring(key, f.n_bits)?] = *p;
        }
        let mut d = Distribution::new(f.n_bits, probs)?;
        if let Some(shots) = f.shots {
            if shots == 0 {
                return Err(Error::ZeroShots);
            }
            let off_grid = d.probs.iter().any(|p| {
                let k = p * shots as f64;
                (k - k.round()).abs() > 1e-6
            });
            if off_grid {
                return Err(Error::InvalidDistribution(format!(
                    "probabilities are not multiples of 1/{shots}"
                )));
            }
            d.shots = Some(shots);
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstrings_are_msb_first() {
        assert_eq!(format_bitstring(11, 5), "01011");
        assert_eq!(parse_bitstring("01011", 5).unwrap(), 11);
        assert!(parse_bitstring("0102", 4).is_err());
        assert!(parse_bitstring("01", 3).is_err());
    }

    #[test]
    fn validates_mass() {
        assert!(Distribution::new(1, vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(1, vec![1.0]).is_err());
        assert!(Distribution::new(1, vec![1.0 + 1e-13, -1e-13]).is_ok());
    }

    #[test]
    fn readout_on_basis_state() {
        let d = Distribution::point_mass(1, 0).with_readout_error(0.02, 0.0);
        assert!((d.prob(0) - 0.98).abs() < 1e-15);
        assert!((d.prob(1) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn json_omits_zero_bins_and_checks_shot_grid() {
        let d = Distribution::from_counts(2, &[3, 0, 1, 0]).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(
            text,
            r#"{"n_bits":2,"shots":4,"probs":{"00":0.75,"10":0.25}}"#
        );
        assert_eq!(serde_json::from_str::<Distribution>(&text).unwrap(), d);
        let off = r#"{"n_bits":1,"shots":4,"probs":{"0":0.3,"1":0.7}}"#;
        assert!(serde_json::from_str::<Distribution>(off).is_err());
        let bad_key = r#"{"n_bits":2,"shots":null,"probs":{"0":1.0}}"#;
        assert!(serde_json::from_str::<Distribution>(bad_key).is_err());
    }
}
