//! Replace a terminal measured region by a trained shallow ansatz.
//!
//! The target is the ideal output distribution of the region; every
//! candidate ansatz is trained against it under noise, and the winner is
//! substituted only if it scores better than the original under the same
//! noise.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{
    build_ansatz, chi_squared, train, AnsatzSpec, Entangler, Environment, Summary, TrainOptions,
    TrainReport, IDEAL_EVAL_STREAM, NOISY_EVAL_STREAM,
};
use crate::circuit::{decompose_to_basis, emit_circuit, Circuit, Region};
use crate::error::{Error, Result};
use crate::optimizer::OptStatus;
use crate::sim::{run_ideal, run_noisy, sample_shots, Distribution, NoiseModel};

const HARDWARE_EVAL_STREAM: u64 = 0x6a09_e667_f3bc_c908;

#[derive(Debug, Clone, PartialEq)]
pub struct CompileRequest {
    pub circuit: Circuit,
    /// Region to replace; `None` means every gate of the circuit.
    pub region: Option<String>,
    /// Noise used for training and for the noisy comparison.
    pub noise: NoiseModel,
    /// Harsher noise standing in for a hardware run; defaults to twice `noise`.
    pub hardware_noise: Option<NoiseModel>,
    pub search_space: Vec<AnsatzSpec>,
    pub seeds: Vec<u64>,
    pub shots: u64,
    pub train: TrainOptions,
}

impl CompileRequest {
    /// Request over [`default_grid`] with default noise and training options.
    pub fn new(circuit: Circuit, seeds: Vec<u64>) -> Self {
        let width = circuit.measured_qubits().len();
        CompileRequest {
            circuit,
            region: None,
            noise: NoiseModel::default(),
            hardware_noise: None,
            search_space: default_grid(width),
            seeds,
            shots: 4096,
            train: TrainOptions::default(),
        }
    }

    pub fn hardware_noise(&self) -> NoiseModel {
        self.hardware_noise
            .unwrap_or_else(|| self.noise.scaled(2.0))
    }
}

/// Layers 0 through 5 for both entanglers; the unentangled ansatz once.
pub fn default_grid(n_qubits: usize) -> Vec<AnsatzSpec> {
    std::iter::once(AnsatzSpec::new(n_qubits, 0, Entangler::None))
        .chain(
            [Entangler::Linear, Entangler::Full]
                .into_iter()
                .flat_map(|e| (1..=5).map(move |p| AnsatzSpec::new(n_qubits, p, e))),
        )
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompileStatus {
    Substituted,
    /// No candidate beat the original; it is returned unchanged.
    PassThrough,
}

/// Per-seed values with their median and quartiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedStats {
    pub per_seed: Vec<f64>,
    #[serde(flatten)]
    pub summary: Summary,
}

impl SeedStats {
    fn new(per_seed: Vec<f64>) -> Self {
        let summary = Summary::of(&per_seed);
        SeedStats { per_seed, summary }
    }

    pub fn median(&self) -> f64 {
        self.summary.median
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRun {
    pub seed: u64,
    pub status: OptStatus,
    pub final_cost: f64,
    pub chi2_ideal: f64,
    pub chi2_noisy: f64,
    pub leakage_noisy: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub spec: AnsatzSpec,
    pub basis_depth: usize,
    /// Shallow enough and improved on its start in at least one run.
    pub eligible: bool,
    pub chi2_noisy: SeedStats,
    pub chi2_ideal: SeedStats,
    pub runs: Vec<CandidateRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileReport {
    pub status: CompileStatus,
    pub chosen_spec: Option<AnsatzSpec>,
    /// Seed of the run whose parameters were substituted.
    pub chosen_seed: Option<u64>,
    pub chosen_params: Vec<f64>,
    pub original_depth: usize,
    pub compiled_depth: usize,
    pub chi2_original_noisy: SeedStats,
    pub chi2_original_ideal: SeedStats,
    pub chi2_compiled_noisy: SeedStats,
    pub chi2_compiled_ideal: SeedStats,
    pub chi2_original_hardware: SeedStats,
    pub chi2_compiled_hardware: SeedStats,
    pub ground_truth: Distribution,
    pub candidates: Vec<Candidate>,
    /// Compiled circuit in `.qc` text form.
    pub compiled_circuit: String,
    pub wall_time: f64,
}

impl CompileReport {
    pub fn compiled(&self) -> Result<Circuit> {
        crate::circuit::parse_circuit(&self.compiled_circuit)
    }
}

fn resolve_region(c: &Circuit, name: Option<&str>) -> Result<Region> {
    let region = match name {
        Some(n) => c
            .region(n)
            .cloned()
            .ok_or_else(|| Error::UnknownRegion(n.to_string()))?,
        None => Region {
            name: String::new(),
            start: 0,
            end: c.len(),
        },
    };
    if region.is_empty() {
        return Err(Error::EmptyRegion(region.name));
    }
    Ok(region)
}

/// The replacement starts from |0> on the measured qubits and nothing may
/// act on them afterwards, so gates outside the region must leave the
/// measured qubits alone.
fn check_terminal(c: &Circuit, region: &Region) -> Result<()> {
    let measured = c.measured_qubits();
    if measured.is_empty() {
        return Err(Error::NoMeasurement);
    }
    for (range, side) in [(0..region.start, "before"), (region.end..c.len(), "after")] {
        if let Some(q) = c
            .touched_qubits(range)
            .into_iter()
            .find(|q| measured.contains(q))
        {
            return Err(Error::InvalidRequest(format!(
                "measured qubit {q} is acted on {side} the replaced region"
            )));
        }
    }
    Ok(())
}

/// Replaces the gates of `region` (all gates if `None`) by `replacement`.
///
/// Replacement qubits are mapped onto `c` as follows: the k-th measured
/// qubit of the replacement goes to the k-th measured qubit of `c`; its
/// remaining qubits go, in ascending order, to the unmeasured qubits the
/// region touches. Regions other than the replaced one are shifted; the
/// replaced region keeps its name and spans the inserted gates.
pub fn substitute(c: &Circuit, region: Option<&str>, replacement: &Circuit) -> Result<Circuit> {
    let target = resolve_region(c, region)?;
    let measured = c.measured_qubits();
    let r_measured = replacement.measured_qubits();
    if r_measured.len() != measured.len() {
        return Err(Error::MappingConflict(format!(
            "replacement measures {} qubits, circuit measures {}",
            r_measured.len(),
            measured.len()
        )));
    }
    let spare: Vec<usize> = c
        .touched_qubits(target.range())
        .into_iter()
        .filter(|q| !measured.contains(q))
        .collect();
    let mut spare = spare.into_iter();
    let mut map = vec![0usize; replacement.n_qubits()];
    for (j, slot) in map.iter_mut().enumerate() {
        *slot = match r_measured.iter().position(|&m| m == j) {
            Some(k) => measured[k],
            None => spare.next().ok_or_else(|| {
                Error::MappingConflict(format!(
                    "replacement has {} qubits, more than region `{}` can host",
                    replacement.n_qubits(),
                    target.name
                ))
            })?,
        };
    }

    let inserted: Vec<_> = replacement
        .gates()
        .iter()
        .map(|g| g.map_qubits(|q| map[q]))
        .collect();
    let shift = |i: usize| {
        if i >= target.end {
            i - target.len() + inserted.len()
        } else {
            i
        }
    };
    let mut regions = Vec::new();
    if region.is_some() {
        for r in c.regions() {
            if r.name == target.name {
                regions.push(Region {
                    name: r.name.clone(),
                    start: r.start,
                    end: r.start + inserted.len(),
                });
            } else {
                regions.push(Region {
                    name: r.name.clone(),
                    start: shift(r.start),
                    end: shift(r.end),
                });
            }
        }
    }
    let mut gates = c.gates()[..target.start].to_vec();
    gates.extend(inserted);
    gates.extend_from_slice(&c.gates()[target.end..]);
    Circuit::from_parts(c.n_qubits(), gates, regions, measured.to_vec())
}

fn sampled_chi2(dist: &Distribution, gt: &Distribution, shots: u64, seed: u64) -> Result<f64> {
    Ok(chi_squared(&sample_shots(dist, shots, seed)?, gt)?.value)
}

fn per_seed_chi2(
    dist: &Distribution,
    gt: &Distribution,
    shots: u64,
    seeds: &[u64],
    stream: u64,
) -> Result<SeedStats> {
    let values = seeds
        .iter()
        .map(|&s| sampled_chi2(dist, gt, shots, s ^ stream))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeedStats::new(values))
}

fn validate(req: &CompileRequest, width: usize) -> Result<()> {
    if req.search_space.is_empty() {
        return Err(Error::InvalidRequest("empty search space".into()));
    }
    if req.seeds.is_empty() {
        return Err(Error::InvalidRequest("no seeds".into()));
    }
    if req.shots == 0 {
        return Err(Error::ZeroShots);
    }
    if let Some(s) = req.search_space.iter().find(|s| s.n_qubits != width) {
        return Err(Error::InvalidRequest(format!(
            "{s} acts on {} qubits but {width} are measured",
            s.n_qubits
        )));
    }
    Ok(())
}

fn summarize(spec: AnsatzSpec, reports: &[TrainReport], max_depth: usize) -> Candidate {
    let basis_depth = reports[0].basis_depth;
    let runs: Vec<CandidateRun> = reports
        .iter()
        .map(|r| CandidateRun {
            seed: r.seed,
            status: r.status,
            final_cost: r.final_cost,
            chi2_ideal: r.chi2_ideal_eval,
            chi2_noisy: r.chi2_noisy_eval,
            leakage_noisy: r.leakage_noisy_eval,
            evaluations: r.evaluations,
        })
        .collect();
    Candidate {
        spec,
        basis_depth,
        eligible: basis_depth <= max_depth && reports.iter().any(TrainReport::improved),
        chi2_noisy: SeedStats::new(runs.iter().map(|r| r.chi2_noisy).collect()),
        chi2_ideal: SeedStats::new(runs.iter().map(|r| r.chi2_ideal).collect()),
        runs,
    }
}

pub fn compile(req: &CompileRequest) -> Result<CompileReport> {
    let started = Instant::now();
    let c = &req.circuit;
    let region = resolve_region(c, req.region.as_deref())?;
    check_terminal(c, &region)?;
    let width = c.measured_qubits().len();
    validate(req, width)?;

    let gt = run_ideal(c)?;
    let original_basis = decompose_to_basis(c);
    let original_depth = original_basis.depth();
    let hardware = req.hardware_noise();
    let shots = req.shots;
    let seeds = &req.seeds;

    let original_noisy = per_seed_chi2(
        &run_noisy(&original_basis, &req.noise)?,
        &gt,
        shots,
        seeds,
        NOISY_EVAL_STREAM,
    )?;
    let original_ideal = per_seed_chi2(&gt, &gt, shots, seeds, IDEAL_EVAL_STREAM)?;
    let original_hardware = per_seed_chi2(
        &run_noisy(&original_basis, &hardware)?,
        &gt,
        shots,
        seeds,
        HARDWARE_EVAL_STREAM,
    )?;

    let env = Environment::Noisy { noise: req.noise };
    let opts = TrainOptions {
        eval_shots: shots,
        ..req.train
    };
    let cells: Vec<(usize, u64)> = (0..req.search_space.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();
    let reports = cells
        .par_iter()
        .map(|&(i, s)| train(&req.search_space[i], &gt, &env, &opts, s))
        .collect::<Result<Vec<_>>>()?;
    let per_spec: Vec<&[TrainReport]> = reports.chunks(seeds.len()).collect();
    let candidates: Vec<Candidate> = req
        .search_space
        .iter()
        .zip(&per_spec)
        .map(|(spec, rs)| summarize(*spec, rs, original_depth))
        .collect();

    let best = candidates
        .iter()
        .enumerate()
        .filter(|(_, cand)| cand.eligible)
        .min_by(|(_, a), (_, b)| {
            a.chi2_noisy
                .median()
                .total_cmp(&b.chi2_noisy.median())
                .then(a.basis_depth.cmp(&b.basis_depth))
                .then(a.spec.layers.cmp(&b.spec.layers))
        })
        .filter(|(_, cand)| cand.chi2_noisy.median() < original_noisy.median());

    let mut report = CompileReport {
        status: CompileStatus::PassThrough,
        chosen_spec: None,
        chosen_seed: None,
        chosen_params: Vec::new(),
        original_depth,
        compiled_depth: original_depth,
        chi2_compiled_noisy: original_noisy.clone(),
        chi2_compiled_ideal: original_ideal.clone(),
        chi2_compiled_hardware: original_hardware.clone(),
        chi2_original_noisy: original_noisy,
        chi2_original_ideal: original_ideal,
        chi2_original_hardware: original_hardware,
        ground_truth: gt.clone(),
        candidates: Vec::new(),
        compiled_circuit: emit_circuit(c),
        wall_time: 0.0,
    };

    if let Some((i, cand)) = best {
        // Lowest training cost among the winning spec's runs; earliest seed on ties.
        let run = per_spec[i]
            .iter()
            .min_by(|a, b| a.final_cost.total_cmp(&b.final_cost))
            .expect("seeds are non-empty");
        let ansatz = build_ansatz(&cand.spec, &run.best_params)?;
        let compiled = substitute(c, req.region.as_deref(), &ansatz)?;
        let compiled_basis = decompose_to_basis(&compiled);
        report.status = CompileStatus::Substituted;
        report.chosen_spec = Some(cand.spec);
        report.chosen_seed = Some(run.seed);
        report.chosen_params = run.best_params.clone();
        report.compiled_depth = compiled_basis.depth();
        report.chi2_compiled_noisy = cand.chi2_noisy.clone();
        report.chi2_compiled_ideal = cand.chi2_ideal.clone();
        report.chi2_compiled_hardware = per_seed_chi2(
            &run_noisy(&compiled_basis, &hardware)?,
            &gt,
            shots,
            seeds,
            HARDWARE_EVAL_STREAM,
        )?;
        report.compiled_circuit = emit_circuit(&compiled);
    }
    report.candidates = candidates;
    report.wall_time = started.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::optimizer::OptimizerConfig;
    use crate::qpe::{build_qpe, PhaseSpec, QPE_REGION};

    fn qpe() -> Circuit {
        build_qpe(PhaseSpec::new(1.0 / 3.0).unwrap(), 5)
            .unwrap()
            .circuit
    }

    #[test]
    fn identity_substitution_preserves_distribution() {
        let c = qpe();
        for region in [None, Some(QPE_REGION)] {
            let s = substitute(&c, region, &c).unwrap();
            assert_eq!(s.gates(), c.gates());
            let tv = run_ideal(&s)
                .unwrap()
                .total_variation(&run_ideal(&c).unwrap())
                .unwrap();
            assert!(tv < 1e-12);
        }
    }

    #[test]
    fn ansatz_lands_on_measured_qubits() {
        let c = qpe();
        let spec = AnsatzSpec::new(5, 1, Entangler::Linear);
        let params: Vec<f64> = (0..spec.param_count()).map(|i| 0.1 * i as f64).collect();
        let ansatz = build_ansatz(&spec, &params).unwrap();
        let s = substitute(&c, Some(QPE_REGION), &ansatz).unwrap();
        // ansatz qubit j is measured j-th; the circuit measures 4,3,2,1,0
        assert_eq!(s.gates()[0], Gate::Ry(0.0, 4));
        assert_eq!(s.gates()[10], Gate::Cx(4, 3));
        assert_eq!(s.region(QPE_REGION).unwrap().range(), 0..ansatz.len());
        let a = run_ideal(&ansatz).unwrap();
        let b = run_ideal(&s).unwrap();
        assert!(a.total_variation(&b).unwrap() < 1e-12);
    }

    #[test]
    fn substitution_errors() {
        let mut c = Circuit::new(3);
        c.push(Gate::H(2)).unwrap();
        c.with_region("empty", |_| Ok(())).unwrap();
        c.with_region("body", |c| {
            c.push(Gate::H(0))?;
            c.push(Gate::Cx(0, 1))?;
            Ok(())
        })
        .unwrap();
        c.push(Gate::X(2)).unwrap();
        c.set_measured(vec![0, 1]).unwrap();

        let mut wide = Circuit::new(4);
        wide.push(Gate::Cx(2, 3)).unwrap();
        wide.set_measured(vec![0, 1]).unwrap();
        assert!(matches!(
            substitute(&c, Some("empty"), &wide),
            Err(Error::EmptyRegion(_))
        ));
        assert!(matches!(
            substitute(&c, Some("nope"), &wide),
            Err(Error::UnknownRegion(_))
        ));
        assert!(matches!(
            substitute(&c, Some("body"), &wide),
            Err(Error::MappingConflict(_))
        ));
        let mut narrow = Circuit::new(1);
        narrow.set_measured(vec![0]).unwrap();
        assert!(matches!(
            substitute(&c, Some("body"), &narrow),
            Err(Error::MappingConflict(_))
        ));

        let mut swap = Circuit::new(2);
        swap.push(Gate::X(0)).unwrap();
        swap.set_measured(vec![1, 0]).unwrap();
        let s = substitute(&c, Some("body"), &swap).unwrap();
        assert_eq!(s.gates(), &[Gate::H(2), Gate::X(1), Gate::X(2)]);
        assert_eq!(s.region("body").unwrap().range(), 1..2);
        assert_eq!(s.region("empty").unwrap().range(), 1..1);
    }

    #[test]
    fn non_terminal_regions_are_rejected() {
        let mut c = Circuit::new(2);
        c.with_region("r", |c| {
            c.push(Gate::H(0))?;
            Ok(())
        })
        .unwrap();
        c.push(Gate::X(0)).unwrap();
        c.set_measured(vec![0]).unwrap();
        let mut req = CompileRequest::new(c, vec![1]);
        req.region = Some("r".into());
        assert!(matches!(compile(&req), Err(Error::InvalidRequest(_))));

        let mut bare = Circuit::new(1);
        bare.push(Gate::H(0)).unwrap();
        assert!(matches!(
            compile(&CompileRequest::new(bare, vec![1])),
            Err(Error::NoMeasurement)
        ));
    }

    fn small_request(grid: Vec<AnsatzSpec>) -> CompileRequest {
        let mut req = CompileRequest::new(qpe(), vec![0, 1, 2]);
        req.search_space = grid;
        req.train.optimizer = OptimizerConfig {
            max_evals: 400,
            ..Default::default()
        };
        req
    }

    #[test]
    fn compile_is_reproducible_and_shallower() {
        let req = small_request(vec![AnsatzSpec::new(5, 1, Entangler::Linear)]);
        let mut a = compile(&req).unwrap();
        let mut b = compile(&req).unwrap();
        a.wall_time = 0.0;
        b.wall_time = 0.0;
        assert_eq!(a, b);
        assert_eq!(a.status, CompileStatus::Substituted);
        assert!(a.compiled_depth < a.original_depth);
        assert!(a.chi2_compiled_noisy.median() < a.chi2_original_noisy.median());
        let compiled = a.compiled().unwrap();
        assert_eq!(compiled.measured_qubits(), req.circuit.measured_qubits());
    }

    #[test]
    fn nothing_better_passes_through() {
        let mut req = small_request(vec![AnsatzSpec::new(5, 0, Entangler::None)]);
        req.noise = NoiseModel::noiseless();
        req.train.optimizer.max_evals = 12;
        let r = compile(&req).unwrap();
        assert_eq!(r.status, CompileStatus::PassThrough);
        assert_eq!(r.compiled_circuit, emit_circuit(&req.circuit));
        assert_eq!(r.compiled_depth, r.original_depth);
        assert!(r.chosen_spec.is_none());
    }
}
