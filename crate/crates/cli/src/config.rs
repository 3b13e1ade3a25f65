//! Fully resolved run configurations. Each artifact embeds one of these so a
//! run can be replayed without the original command line or input files.

use anyhow::{bail, Context};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use vqc_core::ansatz::{AnsatzSpec, Entangler, Environment, TrainOptions};
use vqc_core::sim::{Distribution, NoiseModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Qpe(QpeConfig),
    Train(TrainConfig),
    Compile(CompileConfig),
    Bench(BenchConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpeConfig {
    /// As given on the command line, e.g. `1/3`.
    pub theta_text: String,
    pub theta: f64,
    pub t: usize,
    /// Zero means exact probabilities.
    pub shots: u64,
    pub seed: u64,
    pub noise: Option<NoiseModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub target: Distribution,
    pub spec: AnsatzSpec,
    pub environment: Environment,
    pub options: TrainOptions,
    pub seed: u64,
    /// Keep every `history_stride`-th cost in the report.
    pub history_stride: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileConfig {
    /// Input circuit in `.qc` text form.
    pub circuit: String,
    pub region: Option<String>,
    pub noise: NoiseModel,
    pub hardware_noise: NoiseModel,
    pub search_space: Vec<AnsatzSpec>,
    pub seeds: Vec<u64>,
    pub shots: u64,
    pub train: TrainOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Ideal,
    Noisy,
}

impl EnvKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvKind::Ideal => "ideal",
            EnvKind::Noisy => "noisy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub theta_text: String,
    pub theta: f64,
    pub t: usize,
    pub layers: Vec<usize>,
    pub entanglers: Vec<Entangler>,
    pub envs: Vec<EnvKind>,
    pub seeds: Vec<u64>,
    pub noise: NoiseModel,
    pub train: TrainOptions,
}

/// `a/b` parsed exactly and converted once, or a plain decimal.
pub fn parse_theta(s: &str) -> anyhow::Result<f64> {
    let s = s.trim();
    let theta = if s.contains('/') {
        let r: Ratio<i64> = s.parse().with_context(|| format!("bad fraction `{s}`"))?;
        *r.numer() as f64 / *r.denom() as f64
    } else {
        s.parse::<f64>()
            .with_context(|| format!("bad number `{s}`"))?
    };
    if !(0.0..1.0).contains(&theta) {
        bail!("theta must lie in [0, 1), got {s}");
    }
    Ok(theta)
}

/// `3`, `1,4,7`, the half-open range `0..10` or the inclusive `0..=9`.
pub fn parse_list(s: &str) -> anyhow::Result<Vec<u64>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let (b, inclusive) = match b.strip_prefix('=') {
            Some(b) => (b, true),
            None => (b, false),
        };
        let a: u64 = a
            .trim()
            .parse()
            .with_context(|| format!("bad range `{s}`"))?;
        let b: u64 = b
            .trim()
            .parse()
            .with_context(|| format!("bad range `{s}`"))?;
        let end = if inclusive { b + 1 } else { b };
        if a >= end {
            bail!("empty range `{s}`");
        }
        return Ok((a..end).collect());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .with_context(|| format!("bad integer `{v}` in `{s}`"))
        })
        .collect()
}

pub fn parse_entanglers(s: &str) -> anyhow::Result<Vec<Entangler>> {
    s.split(',')
        .map(|e| e.trim().parse::<Entangler>().map_err(Into::into))
        .collect()
}

/// Grid such as `p=0..=5;e=linear,full`. A missing key keeps its default
/// (`p=0..=5`, `e=linear,full`). Specs equal after normalization are
/// listed once.
pub fn parse_grid(s: &str, n_qubits: usize) -> anyhow::Result<Vec<AnsatzSpec>> {
    let mut layers: Vec<u64> = (0..6).collect();
    let mut entanglers = vec![Entangler::Linear, Entangler::Full];
    for part in s.split(';').filter(|p| !p.trim().is_empty()) {
        let Some((key, value)) = part.split_once('=') else {
            bail!("grid entry `{part}` is not key=value");
        };
        match key.trim() {
            "p" => layers = parse_list(value)?,
            "e" => entanglers = parse_entanglers(value)?,
            other => bail!("unknown grid key `{other}` (expected p or e)"),
        }
    }
    let mut grid: Vec<AnsatzSpec> = Vec::new();
    for e in entanglers {
        for &p in &layers {
            let spec = AnsatzSpec::new(n_qubits, p as usize, e).normalized();
            if !grid.contains(&spec) {
                grid.push(spec);
            }
        }
    }
    if grid.is_empty() {
        bail!("grid `{s}` is empty");
    }
    Ok(grid)
}

/// `default`, `none`, or a path to a noise-model JSON file.
pub fn load_noise(arg: &str) -> anyhow::Result<NoiseModel> {
    match arg {
        "default" => Ok(NoiseModel::default()),
        "none" => Ok(NoiseModel::noiseless()),
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read noise model `{path}`"))?;
            serde_json::from_str(&text).with_context(|| format!("invalid noise model `{path}`"))
        }
    }
}

/// A distribution file, or any artifact with a `distribution` field.
pub fn load_distribution(path: &str) -> anyhow::Result<Distribution> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read `{path}`"))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("`{path}` is not JSON"))?;
    if let Some(inner) = value.get_mut("distribution") {
        value = inner.take();
    }
    serde_json::from_value(value).with_context(|| format!("`{path}` is not a distribution"))
}

/// The `config` member of an artifact file.
pub fn load_embedded_config(path: &str) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read `{path}`"))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("`{path}` is not JSON"))?;
    let Some(config) = value.get_mut("config") else {
        bail!("`{path}` has no embedded config");
    };
    serde_json::from_value(config.take()).with_context(|| format!("bad config in `{path}`"))
}
