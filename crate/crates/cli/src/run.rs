//! Executes resolved configurations and renders their artifacts.

use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;
use vqc_core::ansatz::{
    train, AnsatzSpec, Entangler, Environment, Summary, TrainOptions, TrainReport,
};
use vqc_core::circuit::{decompose_to_basis, parse_circuit};
use vqc_core::compiler::{compile, CompileReport, CompileRequest, CompileStatus};
use vqc_core::optimizer::OptStatus;
use vqc_core::qpe::{analytic_qpe_distribution, build_qpe, phase_estimate, PhaseSpec};
use vqc_core::sim::{run_ideal, run_noisy, sample_shots, Distribution};

use crate::config::{BenchConfig, CompileConfig, EnvKind, QpeConfig, RunConfig, TrainConfig};
use crate::svg::{self, Series};

#[derive(Debug, Clone, Serialize)]
pub struct QpeArtifact {
    pub config: RunConfig,
    pub distribution: Distribution,
    pub argmax: String,
    pub p_argmax: f64,
    pub theta_estimate: f64,
    pub chi2_vs_analytic: f64,
    pub leakage_vs_analytic: f64,
    /// Exact closed-form distribution of the ideal circuit.
    #[serde(skip)]
    pub analytic: Distribution,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainArtifact {
    pub config: RunConfig,
    pub cost_history_stride: usize,
    #[serde(flatten)]
    pub report: TrainReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompileArtifact {
    pub config: RunConfig,
    #[serde(flatten)]
    pub report: CompileReport,
}

/// One trained cell of a sweep. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub entangler: Entangler,
    pub p: usize,
    pub env: EnvKind,
    pub seed: u64,
    /// Score in the row's own environment.
    pub chi2: f64,
    pub chi2_ideal: f64,
    pub chi2_noisy: f64,
    pub leakage: f64,
    pub final_cost: f64,
    pub basis_depth: usize,
    pub evaluations: usize,
    pub status: OptStatus,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchAggregate {
    pub entangler: Entangler,
    pub p: usize,
    pub env: EnvKind,
    pub basis_depth: usize,
    pub chi2_median: f64,
    pub chi2_q1: f64,
    pub chi2_q3: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchArtifact {
    pub config: RunConfig,
    pub aggregates: Vec<BenchAggregate>,
    pub rows: Vec<BenchRow>,
    pub wall_time: f64,
}

impl BenchArtifact {
    pub fn aggregate(&self, env: EnvKind, e: Entangler, p: usize) -> Option<&BenchAggregate> {
        self.aggregates
            .iter()
            .find(|a| a.env == env && a.entangler == e && a.p == p)
    }
}

#[allow(clippy::large_enum_variant)]
pub enum Outcome {
    Qpe(QpeArtifact),
    Train(TrainArtifact),
    Compile(CompileArtifact),
    Bench(BenchArtifact),
}

pub fn execute(config: &RunConfig, jobs: Option<usize>) -> anyhow::Result<Outcome> {
    Ok(match config {
        RunConfig::Qpe(c) => Outcome::Qpe(run_qpe(c)?),
        RunConfig::Train(c) => Outcome::Train(run_train(c)?),
        RunConfig::Compile(c) => Outcome::Compile(with_jobs(jobs, || run_compile(c))?),
        RunConfig::Bench(c) => Outcome::Bench(with_jobs(jobs, || run_bench(c))?),
    })
}

fn with_jobs<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> anyhow::Result<T> + Send,
) -> anyhow::Result<T> {
    match jobs {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .context("cannot start worker pool")?
            .install(f),
    }
}

pub fn run_qpe(cfg: &QpeConfig) -> anyhow::Result<QpeArtifact> {
    let started = Instant::now();
    let phase = PhaseSpec::new(cfg.theta)?;
    let inst = build_qpe(phase, cfg.t)?;
    let analytic = analytic_qpe_distribution(phase, cfg.t)?;
    let exact = match &cfg.noise {
        None => run_ideal(&inst.circuit)?,
        Some(nm) => run_noisy(&inst.circuit, nm)?,
    };
    let distribution = match cfg.shots {
        0 => exact,
        shots => sample_shots(&exact, shots, cfg.seed)?,
    };
    let argmax = distribution.bitstring(distribution.argmax());
    let chi = vqc_core::ansatz::chi_squared(&distribution, &analytic)?;
    Ok(QpeArtifact {
        config: RunConfig::Qpe(cfg.clone()),
        p_argmax: distribution.prob(distribution.argmax()),
        theta_estimate: phase_estimate(&argmax)?,
        argmax,
        chi2_vs_analytic: chi.value,
        leakage_vs_analytic: chi.leakage,
        distribution,
        analytic,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

pub fn run_train(cfg: &TrainConfig) -> anyhow::Result<TrainArtifact> {
    let mut report = train(
        &cfg.spec,
        &cfg.target,
        &cfg.environment,
        &cfg.options,
        cfg.seed,
    )?;
    let stride = cfg.history_stride.max(1);
    if stride > 1 {
        report.cost_history = report
            .cost_history
            .iter()
            .copied()
            .step_by(stride)
            .collect();
    }
    Ok(TrainArtifact {
        config: RunConfig::Train(cfg.clone()),
        cost_history_stride: stride,
        report,
    })
}

pub fn run_compile(cfg: &CompileConfig) -> anyhow::Result<CompileArtifact> {
    let circuit = parse_circuit(&cfg.circuit).context("invalid input circuit")?;
    let req = CompileRequest {
        circuit,
        region: cfg.region.clone(),
        noise: cfg.noise,
        hardware_noise: Some(cfg.hardware_noise),
        search_space: cfg.search_space.clone(),
        seeds: cfg.seeds.clone(),
        shots: cfg.shots,
        train: cfg.train,
    };
    Ok(CompileArtifact {
        config: RunConfig::Compile(cfg.clone()),
        report: compile(&req)?,
    })
}

pub fn run_bench(cfg: &BenchConfig) -> anyhow::Result<BenchArtifact> {
    let started = Instant::now();
    let gt = analytic_qpe_distribution(PhaseSpec::new(cfg.theta)?, cfg.t)?;
    let mut cells = Vec::new();
    for &env in &cfg.envs {
        for &e in &cfg.entanglers {
            for &p in &cfg.layers {
                for &seed in &cfg.seeds {
                    cells.push((env, e, p, seed));
                }
            }
        }
    }
    let opts = TrainOptions {
        eval_noise: cfg.noise,
        ..cfg.train
    };
    let rows = cells
        .par_iter()
        .map(|&(env, e, p, seed)| -> anyhow::Result<BenchRow> {
            let spec = AnsatzSpec::new(cfg.t, p, e);
            let environment = match env {
                EnvKind::Ideal => Environment::Ideal,
                EnvKind::Noisy => Environment::Noisy { noise: cfg.noise },
            };
            let r = train(&spec, &gt, &environment, &opts, seed)?;
            let (chi2, leakage) = match env {
                EnvKind::Ideal => (r.chi2_ideal_eval, r.leakage_ideal_eval),
                EnvKind::Noisy => (r.chi2_noisy_eval, r.leakage_noisy_eval),
            };
            Ok(BenchRow {
                entangler: e,
                p,
                env,
                seed,
                chi2,
                chi2_ideal: r.chi2_ideal_eval,
                chi2_noisy: r.chi2_noisy_eval,
                leakage,
                final_cost: r.final_cost,
                basis_depth: r.basis_depth,
                evaluations: r.evaluations,
                status: r.status,
                wall_time: r.wall_time,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let aggregates = rows
        .chunks(cfg.seeds.len())
        .map(|group| {
            let s = Summary::of(&group.iter().map(|r| r.chi2).collect::<Vec<_>>());
            BenchAggregate {
                entangler: group[0].entangler,
                p: group[0].p,
                env: group[0].env,
                basis_depth: group[0].basis_depth,
                chi2_median: s.median,
                chi2_q1: s.q1,
                chi2_q3: s.q3,
            }
        })
        .collect();
    Ok(BenchArtifact {
        config: RunConfig::Bench(cfg.clone()),
        aggregates,
        rows,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Serialize)]
struct DistributionRow {
    bitstring: String,
    probability: f64,
}

pub fn distribution_csv(d: &Distribution) -> anyhow::Result<String> {
    to_csv((0..d.probs().len()).map(|i| DistributionRow {
        bitstring: d.bitstring(i),
        probability: d.prob(i),
    }))
}

#[derive(Serialize)]
struct HistoryRow {
    evaluation: usize,
    cost: f64,
}

/// One row per recorded evaluation; `evaluation` counts from 1.
pub fn history_csv(a: &TrainArtifact) -> anyhow::Result<String> {
    to_csv(
        a.report
            .cost_history
            .iter()
            .enumerate()
            .map(|(i, &cost)| HistoryRow {
                evaluation: i * a.cost_history_stride + 1,
                cost,
            }),
    )
}

#[derive(Serialize)]
struct CandidateRow {
    entangler: Entangler,
    p: usize,
    basis_depth: usize,
    eligible: bool,
    chi2_noisy_median: f64,
    chi2_noisy_q1: f64,
    chi2_noisy_q3: f64,
    chi2_ideal_median: f64,
}

pub fn candidates_csv(r: &CompileReport) -> anyhow::Result<String> {
    to_csv(r.candidates.iter().map(|c| CandidateRow {
        entangler: c.spec.effective_entangler(),
        p: c.spec.layers,
        basis_depth: c.basis_depth,
        eligible: c.eligible,
        chi2_noisy_median: c.chi2_noisy.summary.median,
        chi2_noisy_q1: c.chi2_noisy.summary.q1,
        chi2_noisy_q3: c.chi2_noisy.summary.q3,
        chi2_ideal_median: c.chi2_ideal.summary.median,
    }))
}

pub fn bench_csv(b: &BenchArtifact) -> anyhow::Result<String> {
    to_csv(&b.rows)
}

fn bitstrings(n_bits: usize) -> Vec<String> {
    (0..1usize << n_bits)
        .map(|i| vqc_core::sim::format_bitstring(i, n_bits))
        .collect()
}

pub fn histogram(title: &str, dists: &[(&str, &Distribution)]) -> String {
    let n = dists.first().map_or(1, |(_, d)| d.n_bits());
    let series: Vec<Series> = dists
        .iter()
        .map(|(label, d)| Series {
            label,
            values: d.probs(),
            spread: None,
        })
        .collect();
    svg::bar_chart(title, "outcome", "probability", &bitstrings(n), &series)
}

pub fn qpe_svg(a: &QpeArtifact) -> String {
    let RunConfig::Qpe(cfg) = &a.config else {
        unreachable!("qpe artifact")
    };
    let title = format!(
        "phase estimation, theta = {}, t = {}",
        cfg.theta_text, cfg.t
    );
    histogram(
        &title,
        &[("measured", &a.distribution), ("exact", &a.analytic)],
    )
}

pub fn train_svg(a: &TrainArtifact) -> anyhow::Result<String> {
    let RunConfig::Train(cfg) = &a.config else {
        unreachable!("train artifact")
    };
    let trained = a.report.trained_circuit()?;
    let ideal = run_ideal(&trained)?;
    let title = format!("{} trained ({})", cfg.spec, cfg.environment.name());
    Ok(histogram(
        &title,
        &[("target", &cfg.target), ("trained", &ideal)],
    ))
}

pub fn compile_svg(a: &CompileArtifact) -> anyhow::Result<String> {
    let RunConfig::Compile(cfg) = &a.config else {
        unreachable!("compile artifact")
    };
    let original = parse_circuit(&cfg.circuit)?;
    let compiled = a.report.compiled()?;
    let original_noisy = run_noisy(&decompose_to_basis(&original), &cfg.noise)?;
    let compiled_noisy = run_noisy(&decompose_to_basis(&compiled), &cfg.noise)?;
    let title = match a.report.chosen_spec {
        Some(spec) => format!("compiled to {spec}"),
        None => "no replacement (original kept)".to_string(),
    };
    Ok(histogram(
        &title,
        &[
            ("ideal", &a.report.ground_truth),
            ("original noisy", &original_noisy),
            ("compiled noisy", &compiled_noisy),
        ],
    ))
}

/// Median chi-squared against p with interquartile whiskers, one chart per
/// (environment, entangler) pair, plus depth against chi-squared.
pub fn bench_svgs(b: &BenchArtifact) -> Vec<(String, String)> {
    let RunConfig::Bench(cfg) = &b.config else {
        unreachable!("bench artifact")
    };
    let mut out = Vec::new();
    let mut scatter = Vec::new();
    for &env in &cfg.envs {
        for &e in &cfg.entanglers {
            let aggs: Vec<&BenchAggregate> = cfg
                .layers
                .iter()
                .filter_map(|&p| b.aggregate(env, e, p))
                .collect();
            let medians: Vec<f64> = aggs.iter().map(|a| a.chi2_median).collect();
            let spread: Vec<(f64, f64)> = aggs.iter().map(|a| (a.chi2_q1, a.chi2_q3)).collect();
            let cats: Vec<String> = aggs.iter().map(|a| a.p.to_string()).collect();
            let title = format!(
                "chi-squared, {} entangler, {} simulation",
                e.name(),
                env.name()
            );
            let chart = svg::bar_chart(
                &title,
                "layers p",
                "median chi-squared",
                &cats,
                &[Series {
                    label: e.name(),
                    values: &medians,
                    spread: Some(&spread),
                }],
            );
            out.push((format!("chi2_{}_{}.svg", env.name(), e.name()), chart));
            scatter.push((
                format!("{} {}", e.name(), env.name()),
                aggs.iter()
                    .map(|a| (a.basis_depth as f64, a.chi2_median))
                    .collect::<Vec<_>>(),
            ));
        }
    }
    let series: Vec<(&str, Vec<(f64, f64)>)> = scatter
        .iter()
        .map(|(l, p)| (l.as_str(), p.clone()))
        .collect();
    out.push((
        "depth_vs_chi2.svg".to_string(),
        svg::scatter(
            "depth against chi-squared",
            "basis depth",
            "median chi-squared",
            &series,
        ),
    ));
    out
}

pub fn compile_exit_code(r: &CompileReport) -> u8 {
    match r.status {
        CompileStatus::Substituted => 0,
        CompileStatus::PassThrough => 2,
    }
}
