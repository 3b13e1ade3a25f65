//! Command-line front end for `vqc-core`.

pub mod args;
pub mod config;
pub mod run;
pub mod svg;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use vqc_core::ansatz::{AnsatzSpec, Environment, TrainOptions};
use vqc_core::circuit::emit_circuit;
use vqc_core::compiler::CompileStatus;
use vqc_core::qpe::build_qpe;
use vqc_core::qpe::PhaseSpec;
use vqc_core::sim::NoiseModel;

use args::{Cli, Command, EnvArg, Format, GlobalArgs, OptimizerArgs};
use config::{
    load_distribution, load_embedded_config, load_noise, parse_entanglers, parse_grid, parse_list,
    parse_theta, BenchConfig, CompileConfig, EnvKind, QpeConfig, RunConfig, TrainConfig,
};
use run::Outcome;

fn write_text(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text).with_context(|| format!("cannot write `{}`", p.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn train_options(g: &GlobalArgs, opt: &OptimizerArgs, noise: NoiseModel) -> TrainOptions {
    TrainOptions {
        optimizer: opt.config(),
        restarts: opt.restarts,
        eval_shots: g.shots,
        eval_noise: noise,
    }
}

fn noise_or_default(g: &GlobalArgs) -> anyhow::Result<NoiseModel> {
    g.noise
        .as_deref()
        .map_or(Ok(NoiseModel::default()), load_noise)
}

/// Resolves command-line arguments into a replayable configuration.
pub fn resolve(cli: &Cli) -> anyhow::Result<Option<RunConfig>> {
    let g = &cli.global;
    Ok(Some(match &cli.command {
        Command::Qpe { theta, t, .. } => RunConfig::Qpe(QpeConfig {
            theta_text: theta.clone(),
            theta: parse_theta(theta)?,
            t: *t,
            shots: g.shots,
            seed: g.seed,
            noise: g.noise.as_deref().map(load_noise).transpose()?,
        }),
        Command::Train {
            target,
            p,
            entangler,
            env,
            qubits,
            optimizer,
            history_stride,
            ..
        } => {
            let target = load_distribution(target)?;
            if target.n_bits() != *qubits {
                bail!(
                    "target has {} bits but {} qubits were requested",
                    target.n_bits(),
                    qubits
                );
            }
            let noise = noise_or_default(g)?;
            RunConfig::Train(TrainConfig {
                target,
                spec: AnsatzSpec::new(*qubits, *p, entangler.parse()?),
                environment: match env {
                    EnvArg::Ideal => Environment::Ideal,
                    EnvArg::Noisy => Environment::Noisy { noise },
                },
                options: train_options(g, optimizer, noise),
                seed: g.seed,
                history_stride: *history_stride,
            })
        }
        Command::Compile {
            circuit,
            region,
            grid,
            seeds,
            hardware_noise,
            optimizer,
            ..
        } => {
            let text = std::fs::read_to_string(circuit)
                .with_context(|| format!("cannot read `{}`", circuit.display()))?;
            let parsed = vqc_core::circuit::parse_circuit(&text)?;
            let noise = noise_or_default(g)?;
            RunConfig::Compile(CompileConfig {
                circuit: emit_circuit(&parsed),
                region: region.clone(),
                noise,
                hardware_noise: match hardware_noise {
                    Some(h) => load_noise(h)?,
                    None => noise.scaled(2.0),
                },
                search_space: parse_grid(grid, parsed.measured_qubits().len())?,
                seeds: parse_list(seeds)?,
                shots: g.shots,
                train: train_options(g, optimizer, noise),
            })
        }
        Command::Bench {
            theta,
            t,
            layers,
            entanglers,
            envs,
            seeds,
            optimizer,
        } => {
            let noise = noise_or_default(g)?;
            let envs = envs
                .split(',')
                .map(|e| match e.trim() {
                    "ideal" => Ok(EnvKind::Ideal),
                    "noisy" => Ok(EnvKind::Noisy),
                    other => bail!("unknown environment `{other}`"),
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            RunConfig::Bench(BenchConfig {
                theta_text: theta.clone(),
                theta: parse_theta(theta)?,
                t: *t,
                layers: parse_list(layers)?
                    .into_iter()
                    .map(|p| p as usize)
                    .collect(),
                entanglers: parse_entanglers(entanglers)?,
                envs,
                seeds: parse_list(seeds)?,
                noise,
                train: train_options(g, optimizer, noise),
            })
        }
        Command::Chi2 { .. } => return Ok(None),
        Command::Replay { artifact } => load_embedded_config(artifact)?,
    }))
}

/// Side outputs requested on the command line.
#[derive(Default)]
struct Extras {
    svg: Option<PathBuf>,
    circuit: Option<PathBuf>,
    history_csv: Option<PathBuf>,
}

fn extras(cmd: &Command) -> Extras {
    match cmd {
        Command::Qpe { svg, circuit, .. } => Extras {
            svg: svg.clone(),
            circuit: circuit.clone(),
            ..Default::default()
        },
        Command::Train {
            svg, history_csv, ..
        } => Extras {
            svg: svg.clone(),
            history_csv: history_csv.clone(),
            ..Default::default()
        },
        Command::Compile { svg, qc, .. } => Extras {
            svg: svg.clone(),
            circuit: qc.clone(),
            ..Default::default()
        },
        _ => Extras::default(),
    }
}

/// With `--format csv` the table goes to `--out` and the full artifact to a
/// sibling `.json` file.
fn emit(
    g: &GlobalArgs,
    json: String,
    csv: impl FnOnce() -> anyhow::Result<String>,
) -> anyhow::Result<()> {
    match (g.format, g.out.as_deref()) {
        (Format::Json, out) => write_text(out, &json),
        (Format::Csv, None) => write_text(None, &csv()?),
        (Format::Csv, Some(out)) => {
            write_text(Some(out), &csv()?)?;
            write_text(Some(&out.with_extension("json")), &json)
        }
    }
}

/// Runs the parsed command line and returns the process exit code.
pub fn dispatch(cli: &Cli) -> anyhow::Result<u8> {
    let g = &cli.global;
    if let Command::Chi2 { a, b } = &cli.command {
        let a = load_distribution(a)?;
        let b = load_distribution(b)?;
        let chi = vqc_core::ansatz::chi_squared(&a, &b)?;
        println!("chi2 {}", chi.value);
        println!("leakage {}", chi.leakage);
        return Ok(0);
    }
    let config = resolve(cli)?.expect("handled above");
    let extra = extras(&cli.command);
    let outcome = run::execute(&config, g.jobs)?;
    let mut code = 0;
    match &outcome {
        Outcome::Qpe(a) => {
            eprintln!(
                "argmax {} (p = {:.4}), theta estimate {}, chi2 vs exact {:.4}",
                a.argmax, a.p_argmax, a.theta_estimate, a.chi2_vs_analytic
            );
            emit(g, run::to_json(a)?, || {
                run::distribution_csv(&a.distribution)
            })?;
            if let Some(p) = &extra.svg {
                write_text(Some(p), &run::qpe_svg(a))?;
            }
            if let Some(p) = &extra.circuit {
                let RunConfig::Qpe(cfg) = &config else {
                    unreachable!()
                };
                let inst = build_qpe(PhaseSpec::new(cfg.theta)?, cfg.t)?;
                write_text(Some(p), &(emit_circuit(&inst.circuit) + "\n"))?;
            }
        }
        Outcome::Train(a) => {
            let r = &a.report;
            eprintln!(
                "{}: cost {:.4} -> {:.4} in {} evaluations ({:?}); chi2 ideal {:.4}, noisy {:.4}",
                r.spec,
                r.initial_cost,
                r.final_cost,
                r.evaluations,
                r.status,
                r.chi2_ideal_eval,
                r.chi2_noisy_eval
            );
            emit(g, run::to_json(a)?, || run::history_csv(a))?;
            if let Some(p) = &extra.history_csv {
                write_text(Some(p), &run::history_csv(a)?)?;
            }
            if let Some(p) = &extra.svg {
                write_text(Some(p), &run::train_svg(a)?)?;
            }
        }
        Outcome::Compile(a) => {
            let r = &a.report;
            match r.chosen_spec {
                Some(spec) => eprintln!(
                    "substituted {spec}: depth {} -> {}, noisy chi2 median {:.4} -> {:.4}",
                    r.original_depth,
                    r.compiled_depth,
                    r.chi2_original_noisy.summary.median,
                    r.chi2_compiled_noisy.summary.median
                ),
                None => eprintln!(
                    "no candidate beat the original (noisy chi2 median {:.4}); passed through",
                    r.chi2_original_noisy.summary.median
                ),
            }
            emit(g, run::to_json(a)?, || run::candidates_csv(r))?;
            if let Some(p) = &extra.circuit {
                write_text(Some(p), &(r.compiled_circuit.clone() + "\n"))?;
            }
            if let Some(p) = &extra.svg {
                write_text(Some(p), &run::compile_svg(a)?)?;
            }
            if r.status == CompileStatus::PassThrough {
                code = run::compile_exit_code(r);
            }
        }
        Outcome::Bench(b) => {
            if matches!(cli.command, Command::Replay { .. }) {
                write_text(g.out.as_deref(), &run::to_json(b)?)?;
            } else {
                let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("bench"));
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("cannot create `{}`", dir.display()))?;
                write_text(Some(&dir.join("bench.json")), &run::to_json(b)?)?;
                write_text(Some(&dir.join("bench.csv")), &run::bench_csv(b)?)?;
                for (name, svg) in run::bench_svgs(b) {
                    write_text(Some(&dir.join(name)), &svg)?;
                }
                eprintln!("{} runs written to {}", b.rows.len(), dir.display());
            }
            for a in &b.aggregates {
                eprintln!(
                    "{:>5} {:<6} p={} depth {:>3}  chi2 median {:.4} [{:.4}, {:.4}]",
                    a.env.name(),
                    a.entangler.name(),
                    a.p,
                    a.basis_depth,
                    a.chi2_median,
                    a.chi2_q1,
                    a.chi2_q3
                );
            }
        }
    }
    Ok(code)
}
