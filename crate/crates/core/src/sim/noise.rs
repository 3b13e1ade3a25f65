use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Synthetic device noise: depolarizing after every gate plus independent
/// per-qubit readout flips.
///
/// JSON form: `{"p1": 0.001, "p2": 0.01, "readout_p01": 0.02, "readout_p10": 0.02}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNoise")]
pub struct NoiseModel {
    /// Depolarizing probability after each single-qubit gate.
    pub p1: f64,
    /// Depolarizing probability after each two-qubit gate.
    pub p2: f64,
    /// P(read 1 | true 0).
    pub readout_p01: f64,
    /// P(read 0 | true 1).
    pub readout_p10: f64,
}

#[derive(Deserialize)]
struct RawNoise {
    p1: f64,
    p2: f64,
    readout_p01: f64,
    readout_p10: f64,
}

impl TryFrom<RawNoise> for NoiseModel {
    type Error = Error;

    fn try_from(r: RawNoise) -> Result<Self> {
        NoiseModel::new(r.p1, r.p2, r.readout_p01, r.readout_p10)
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            p1: 1e-3,
            p2: 1e-2,
            readout_p01: 2e-2,
            readout_p10: 2e-2,
        }
    }
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, readout_p01: f64, readout_p10: f64) -> Result<Self> {
        for (name, value) in [
            ("p1", p1),
            ("p2", p2),
            ("readout_p01", readout_p01),
            ("readout_p10", readout_p10),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        Ok(NoiseModel {
            p1,
            p2,
            readout_p01,
            readout_p10,
        })
    }

    pub fn noiseless() -> Self {
        NoiseModel {
            p1: 0.0,
            p2: 0.0,
            readout_p01: 0.0,
            readout_p10: 0.0,
        }
    }

    /// Every rate multiplied by `factor`, clamped to 1.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |p: f64| (p * factor).clamp(0.0, 1.0);
        NoiseModel {
            p1: s(self.p1),
            p2: s(self.p2),
            readout_p01: s(self.readout_p01),
            readout_p10: s(self.readout_p10),
        }
    }

    pub fn is_noiseless(&self) -> bool {
        *self == Self::noiseless()
    }
}
