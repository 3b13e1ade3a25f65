//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vqc_cli::config::{
    load_embedded_config, BenchConfig, CompileConfig, EnvKind, QpeConfig, RunConfig, TrainConfig,
};
use vqc_cli::run::{self, Outcome};
use vqc_core::ansatz::{chi_squared, cost, AnsatzSpec, Entangler, Environment, TrainOptions};
use vqc_core::circuit::{emit_circuit, Circuit, Gate};
use vqc_core::compiler::{default_grid, CompileStatus};
use vqc_core::optimizer::{cobyla_minimize, OptimizerConfig};
use vqc_core::qpe::{build_iqft, build_qft, build_qpe, precision_qubits, PhaseSpec};
use vqc_core::sim::{run_ideal, run_noisy, Distribution, NoiseModel, StateVector};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Outcome probabilities by direct summation of the phase-kickback
/// amplitudes, without any closed form.
fn qpe_oracle(theta: f64, t: u32) -> Vec<f64> {
    let size = 1usize << t;
    (0..size)
        .map(|m| {
            let delta = theta - m as f64 / size as f64;
            let amp: Complex64 = (0..size)
                .map(|k| Complex64::from_polar(1.0, TAU * k as f64 * delta))
                .sum::<Complex64>()
                / size as f64;
            amp.norm_sqr()
        })
        .collect()
}

/// Most significant measured bit first; measurement order t-1 .. 0 makes
/// the outcome index equal to m.
fn bitstring(m: usize, t: u32) -> String {
    format!("{m:0width$b}", width = t as usize)
}

fn criterion_1() -> Verdict {
    let cfg = QpeConfig {
        theta_text: "1/3".into(),
        theta: 1.0 / 3.0,
        t: 5,
        shots: 0,
        seed: 1,
        noise: None,
    };
    let a = run::run_qpe(&cfg).unwrap();
    let oracle = qpe_oracle(1.0 / 3.0, 5);
    let max_dev = a
        .distribution
        .probs()
        .iter()
        .zip(&oracle)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let m_star = (0..oracle.len())
        .max_by(|&i, &j| oracle[i].total_cmp(&oracle[j]))
        .unwrap();
    let p_dev = (a.p_argmax - oracle[m_star]).abs();
    verdict(
        max_dev <= 1e-9
            && a.argmax == "01011"
            && a.argmax == bitstring(m_star, 5)
            && a.theta_estimate == 0.34375
            && p_dev <= 1e-6,
        format!(
            "argmax {} theta {} P {:.6} (oracle {:.6}), max bin deviation {max_dev:.1e}",
            a.argmax, a.theta_estimate, a.p_argmax, oracle[m_star]
        ),
    )
}

fn unitary(c: &Circuit) -> Vec<Vec<Complex64>> {
    (0..1usize << c.n_qubits())
        .map(|j| {
            let mut sv = StateVector::basis(c.n_qubits(), j);
            sv.apply_all(c.gates());
            sv.amplitudes().to_vec()
        })
        .collect()
}

fn criterion_2() -> Verdict {
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        let qubits: Vec<usize> = (0..n).collect();
        let mut c = Circuit::new(n);
        c.extend(build_iqft(&qubits)).unwrap();
        c.extend(build_qft(&qubits)).unwrap();
        let u = unitary(&c);
        let phase = u[0][0];
        for (j, col) in u.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                let expected = if i == j {
                    phase
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((z - expected).norm());
            }
        }
        worst = worst.max((phase.norm() - 1.0).abs());
    }
    verdict(
        worst <= 1e-10,
        format!("max deviation from identity {worst:.1e}"),
    )
}

fn criterion_3() -> Verdict {
    let a = precision_qubits(5, 0.5).unwrap();
    let b = precision_qubits(5, 0.25).unwrap();
    // 5 + ceil(log2(2 + 1/(2 eps))): log2(3) and log2(4) both round up to 2
    verdict(
        a == 7 && b == 7,
        format!("t(5, 0.5) = {a}, t(5, 0.25) = {b}"),
    )
}

fn random_circuit(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n.max(2))) % n;
        let angle = rng.random_range(-TAU..TAU);
        let g = match rng.random_range(0..if n > 1 { 7 } else { 4 }) {
            0 => Gate::H(a),
            1 => Gate::X(a),
            2 => Gate::Ry(angle, a),
            3 => Gate::Rz(angle, a),
            4 => Gate::Cx(a, b),
            5 => Gate::Cp(angle, a, b),
            _ => Gate::Swap(a, b),
        };
        c.push(g).unwrap();
    }
    c.set_measured((0..n).rev().collect()).unwrap();
    c
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(1..=5);
        let len = rng.random_range(1..=40);
        let c = random_circuit(&mut rng, n, len);
        let ideal = run_ideal(&c).unwrap();
        let noisy = run_noisy(&c, &NoiseModel::noiseless()).unwrap();
        for (a, b) in ideal.probs().iter().zip(noisy.probs()) {
            worst = worst.max((a - b).abs());
        }
    }
    verdict(
        worst <= 1e-10,
        format!("50 circuits, max bin deviation {worst:.1e}"),
    )
}

fn criterion_5() -> Verdict {
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let rosenbrock = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    let s_cfg = OptimizerConfig {
        max_evals: 500,
        ..Default::default()
    };
    let r_cfg = OptimizerConfig {
        max_evals: 2000,
        ..Default::default()
    };
    let s = cobyla_minimize(sphere, &[1.0; 5], &s_cfg).unwrap();
    let r = cobyla_minimize(rosenbrock, &[-1.2, 1.0], &r_cfg).unwrap();
    let deterministic = s == cobyla_minimize(sphere, &[1.0; 5], &s_cfg).unwrap()
        && r == cobyla_minimize(rosenbrock, &[-1.2, 1.0], &r_cfg).unwrap();
    let r_err = r.best_x.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let sphere_ok = s.best_f <= 1e-6 && s.evals_used <= 500;
    let rosen_ok = r_err <= 1e-2 && r.evals_used <= 2000;
    verdict(
        sphere_ok && rosen_ok && deterministic,
        format!(
            "sphere best_f {:.1e} in {} evals [{}]; rosenbrock at ({:.4}, {:.4}) in {} evals, \
             |x - (1,1)|inf {:.3} [{}]; deterministic [{}]",
            s.best_f,
            s.evals_used,
            ok(sphere_ok),
            r.best_x[0],
            r.best_x[1],
            r.evals_used,
            r_err,
            ok(rosen_ok),
            ok(deterministic)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "not met"
    }
}

fn bench(envs: Vec<EnvKind>, layers: Vec<usize>) -> run::BenchArtifact {
    let noise = NoiseModel::default();
    run::run_bench(&BenchConfig {
        theta_text: "1/3".into(),
        theta: 1.0 / 3.0,
        t: 5,
        layers,
        entanglers: vec![Entangler::Linear, Entangler::Full],
        envs,
        seeds: (0..10).collect(),
        noise,
        train: TrainOptions {
            eval_noise: noise,
            ..Default::default()
        },
    })
    .unwrap()
}

fn median(b: &run::BenchArtifact, env: EnvKind, e: Entangler, p: usize) -> f64 {
    b.aggregate(env, e, p).unwrap().chi2_median
}

fn criterion_6() -> Verdict {
    let b = bench(vec![EnvKind::Ideal], vec![1, 5]);
    let m = |e, p| median(&b, EnvKind::Ideal, e, p);
    let (f1, f5, l1, l5) = (
        m(Entangler::Full, 1),
        m(Entangler::Full, 5),
        m(Entangler::Linear, 1),
        m(Entangler::Linear, 5),
    );
    verdict(
        f1 <= 0.7 && f5 <= f1 && l5 <= l1,
        format!(
            "median ideal chi2 over 10 seeds: full p=1 {f1:.4}, p=5 {f5:.4}; \
             linear p=1 {l1:.4}, p=5 {l5:.4}"
        ),
    )
}

fn criterion_7() -> Verdict {
    let b = bench(vec![EnvKind::Noisy], (1..=5).collect());
    let m = |e, p| median(&b, EnvKind::Noisy, e, p);
    let full: Vec<f64> = (1..=5).map(|p| m(Entangler::Full, p)).collect();
    let linear: Vec<f64> = (1..=5).map(|p| m(Entangler::Linear, p)).collect();
    let rises = full[4] > full[0];
    let linear_below = (1..5).all(|i| linear[i] <= full[i]);
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    verdict(
        rises && linear_below,
        format!(
            "median noisy chi2 p=1..5: full [{}], linear [{}]",
            fmt(&full),
            fmt(&linear)
        ),
    )
}

fn qpe_text() -> String {
    emit_circuit(
        &build_qpe(PhaseSpec::new(1.0 / 3.0).unwrap(), 5)
            .unwrap()
            .circuit,
    )
}

fn criterion_8() -> Verdict {
    let noise = NoiseModel::default();
    let a = run::run_compile(&CompileConfig {
        circuit: qpe_text(),
        region: None,
        noise,
        hardware_noise: noise.scaled(2.0),
        search_space: default_grid(5),
        seeds: (0..10).collect(),
        shots: 4096,
        train: TrainOptions {
            eval_noise: noise,
            ..Default::default()
        },
    })
    .unwrap();
    let r = &a.report;
    let original = r.chi2_original_noisy.summary.median;
    let compiled = r.chi2_compiled_noisy.summary.median;
    let chosen = r.chosen_spec;
    let pass = r.status == CompileStatus::Substituted
        && compiled < original
        && 3 * r.compiled_depth < r.original_depth;
    verdict(
        pass,
        format!(
            "chosen {}, noisy chi2 median {compiled:.4} vs original {original:.4}, \
             depth {} vs {}",
            chosen.map_or("none".to_string(), |s| s.to_string()),
            r.compiled_depth,
            r.original_depth
        ),
    )
}

fn criterion_9() -> Verdict {
    let a = Distribution::new(2, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
    let b = Distribution::new(2, vec![0.25, 0.75, 0.0, 0.0]).unwrap();
    let c = cost(&a, &b).unwrap();
    let x = chi_squared(&a, &b).unwrap().value;
    verdict(
        (c - 0.5).abs() <= 1e-12 && (x - 1.0 / 3.0).abs() <= 1e-12,
        format!("cost {c}, chi2 {x}"),
    )
}

fn strip_wall_time(json: &str) -> String {
    json.lines()
        .filter(|l| !l.contains("\"wall_time\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn artifact_json(o: &Outcome) -> String {
    match o {
        Outcome::Qpe(a) => run::to_json(a),
        Outcome::Train(a) => run::to_json(a),
        Outcome::Compile(a) => run::to_json(a),
        Outcome::Bench(a) => run::to_json(a),
    }
    .unwrap()
}

fn criterion_10() -> Verdict {
    let dir = tempfile::TempDir::new().unwrap();
    let noise = NoiseModel::default();
    let small = TrainOptions {
        optimizer: OptimizerConfig {
            max_evals: 300,
            ..Default::default()
        },
        eval_noise: noise,
        ..Default::default()
    };
    let gt =
        vqc_core::qpe::analytic_qpe_distribution(PhaseSpec::new(1.0 / 3.0).unwrap(), 5).unwrap();
    let configs = [
        RunConfig::Qpe(QpeConfig {
            theta_text: "1/3".into(),
            theta: 1.0 / 3.0,
            t: 5,
            shots: 4096,
            seed: 7,
            noise: Some(noise),
        }),
        RunConfig::Train(TrainConfig {
            target: gt,
            spec: AnsatzSpec::new(5, 2, Entangler::Full),
            environment: Environment::Noisy { noise },
            options: small,
            seed: 3,
            history_stride: 5,
        }),
        RunConfig::Compile(CompileConfig {
            circuit: qpe_text(),
            region: Some("qpe".into()),
            noise,
            hardware_noise: noise.scaled(2.0),
            search_space: vec![
                AnsatzSpec::new(5, 0, Entangler::None),
                AnsatzSpec::new(5, 1, Entangler::Linear),
            ],
            seeds: vec![0, 1, 2],
            shots: 4096,
            train: small,
        }),
        RunConfig::Bench(BenchConfig {
            theta_text: "1/3".into(),
            theta: 1.0 / 3.0,
            t: 5,
            layers: vec![0, 1],
            entanglers: vec![Entangler::Linear, Entangler::Full],
            envs: vec![EnvKind::Ideal, EnvKind::Noisy],
            seeds: vec![0, 1, 2],
            noise,
            train: small,
        }),
    ];
    let mut mismatches = Vec::new();
    for (i, cfg) in configs.iter().enumerate() {
        let first = artifact_json(&run::execute(cfg, None).unwrap());
        let path = dir.path().join(format!("artifact{i}.json"));
        std::fs::write(&path, &first).unwrap();
        let replayed_cfg = load_embedded_config(path.to_str().unwrap()).unwrap();
        let second = artifact_json(&run::execute(&replayed_cfg, None).unwrap());
        if replayed_cfg != *cfg || strip_wall_time(&first) != strip_wall_time(&second) {
            mismatches.push(i);
        }
    }
    verdict(
        mismatches.is_empty(),
        format!("qpe, train, compile and bench artifacts replayed; mismatches {mismatches:?}"),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "QPE correctness", Duration::from_secs(1), criterion_1),
        (
            2,
            "IQFT inverse property",
            Duration::from_secs(1),
            criterion_2,
        ),
        (3, "register size", Duration::from_secs(1), criterion_3),
        (
            4,
            "simulator equivalence",
            Duration::from_secs(10),
            criterion_4,
        ),
        (5, "optimizer", Duration::from_secs(5), criterion_5),
        (6, "ideal training", Duration::from_secs(600), criterion_6),
        (7, "noisy reversal", Duration::from_secs(1200), criterion_7),
        (8, "compile pass", Duration::from_secs(1500), criterion_8),
        (9, "metric examples", Duration::from_secs(1), criterion_9),
        (
            10,
            "reproducibility",
            Duration::from_secs(600),
            criterion_10,
        ),
    ];
    let mut failed = Vec::new();
    for (id, title, limit, check) in criteria {
        let started = Instant::now();
        let v = check();
        let elapsed = started.elapsed();
        let pass = v.pass && elapsed <= limit;
        if !pass {
            failed.push(id);
        }
        println!(
            "{} criterion {id:>2} {title}: {} ({:.2} s, limit {} s)",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
