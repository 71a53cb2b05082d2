//! Batch front-end: parse a scenario config, run the mapped operation,
//! write a JSON report (plus a CSV checkpoint trace for the orbit
//! commands), and exit 0 on pass, 1 on a failed verdict, 2 on config or
//! environment errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nilaverage::config::{ErgodicCheckFile, ExperimentFile, VerifyFile, SCHEMA_VERSION};
use nilaverage::ergodicity::{
    skew_translation_is_ergodic, translation_is_ergodic, ErgodicVerdict,
};
use nilaverage::experiments::{self, Checkpoint, Mode, Work};
use nilaverage::verify;

#[derive(Parser)]
#[command(
    name = "nilaverage",
    about = "Non-conventional ergodic averages on unipotent nilmanifolds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path for the JSON report; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Arithmetic mode for the orbit loop.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Worker threads for the Monte-Carlo estimator (results are
    /// identical for any value).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Group axioms and lower-central-series laws on random elements.
    VerifyGroup,
    /// Star-group axioms, closure, lattice closure, polynomial sequences.
    VerifyStar,
    /// Intertwining with the diagonal action, embedding well-definedness.
    VerifyIntertwine,
    /// Commutator-lemma coordinate patterns.
    VerifyLemma,
    /// Exact ergodicity of the translation (or the skew translation when
    /// the config provides x).
    ErgodicCheck,
    /// The non-conventional time average along the orbit.
    Average,
    /// The limit integral over Haar-distributed tuples.
    Limit,
    /// Both sides plus the verdict.
    Compare,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[derive(Serialize)]
struct ErgodicReport {
    schema_version: u32,
    command: String,
    kind: String,
    ergodic: bool,
    witness: Option<Vec<i64>>,
    torus_dim: usize,
    witness_sound: Option<bool>,
}

#[derive(Serialize)]
struct AverageReport {
    schema_version: u32,
    command: String,
    seed: u64,
    mode: Mode,
    time_average: experiments::ComplexValue,
    checkpoints: Vec<Checkpoint>,
    work: Work,
}

#[derive(Serialize)]
struct LimitReport {
    schema_version: u32,
    command: String,
    seed: u64,
    estimator: experiments::Estimator,
    limit_estimate: experiments::ComplexValue,
    stderr: f64,
    deterministic_estimator: bool,
    work: Work,
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| anyhow!("--config is required"))?;
    let raw = fs::read_to_string(config_path)
        .with_context(|| format!("reading {}", config_path.display()))?;
    let started = Instant::now();
    let mode = match cli.mode {
        Some(ModeArg::Exact) => Mode::Exact,
        Some(ModeArg::Float) | None => Mode::Float,
    };
    if matches!(
        cli.command,
        Command::VerifyGroup
            | Command::VerifyStar
            | Command::VerifyIntertwine
            | Command::VerifyLemma
            | Command::ErgodicCheck
    ) && matches!(cli.mode, Some(ModeArg::Float))
    {
        bail!("this command runs in exact arithmetic; --mode float is not meaningful");
    }

    let code = match cli.command {
        Command::VerifyGroup | Command::VerifyStar | Command::VerifyIntertwine
        | Command::VerifyLemma => {
            let file: VerifyFile = serde_json::from_str(&raw).context("parsing verify config")?;
            file.validate()?;
            let seed = cli.seed.unwrap_or(file.seed);
            let report = match cli.command {
                Command::VerifyGroup => verify::verify_group(&file.dimensions, file.cases, seed),
                Command::VerifyStar => verify::verify_star(&file.dimensions, file.cases, seed),
                Command::VerifyIntertwine => {
                    verify::verify_intertwine(&file.dimensions, file.cases, seed)
                }
                Command::VerifyLemma => {
                    let levels = if file.levels.is_empty() {
                        vec![2, 3]
                    } else {
                        file.levels.clone()
                    };
                    verify::verify_lemma(&file.dimensions, &levels, file.cases, seed)
                }
                _ => unreachable!(),
            };
            let pass = report.pass;
            emit(cli, &report, None)?;
            eprintln!(
                "{}: {}/{} checks passed in {:.2?}",
                report.command,
                report.passed,
                report.total,
                started.elapsed()
            );
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::ErgodicCheck => {
            let file: ErgodicCheckFile =
                serde_json::from_str(&raw).context("parsing ergodic-check config")?;
            let (a, x) = file.matrices()?;
            let (kind, verdict): (&str, ErgodicVerdict) = match &x {
                None => ("translation", translation_is_ergodic(&a)?),
                Some(x) => ("skew", skew_translation_is_ergodic(&a, x)?),
            };
            let report = ErgodicReport {
                schema_version: SCHEMA_VERSION,
                command: "ergodic-check".to_string(),
                kind: kind.to_string(),
                ergodic: verdict.ergodic,
                witness: verdict.witness.map(|c| c.0),
                torus_dim: verdict.torus_dim,
                witness_sound: verdict.witness_sound,
            };
            emit(cli, &report, None)?;
            eprintln!(
                "ergodic-check ({kind}): ergodic={} in {:.2?}",
                report.ergodic,
                started.elapsed()
            );
            ExitCode::SUCCESS
        }
        Command::Average => {
            let file: ExperimentFile =
                serde_json::from_str(&raw).context("parsing experiment config")?;
            let mut cfg = file.build()?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let trace = experiments::run_time_average(&cfg, mode)?;
            let value: num_complex::Complex64 = trace.value.into();
            let checkpoints: Vec<Checkpoint> = trace
                .checkpoints
                .iter()
                .map(|(n, v)| Checkpoint {
                    n: *n,
                    re: v.re,
                    im: v.im,
                    abs_diff_running: (num_complex::Complex64::from(*v) - value).norm(),
                })
                .collect();
            let report = AverageReport {
                schema_version: SCHEMA_VERSION,
                command: "average".to_string(),
                seed: cfg.seed,
                mode,
                time_average: trace.value,
                checkpoints,
                work: trace.work,
            };
            emit(cli, &report, Some(&report.checkpoints))?;
            eprintln!(
                "average: ({:.6}, {:.6}) over {} steps in {:.2?}",
                report.time_average.re,
                report.time_average.im,
                cfg.n_steps,
                started.elapsed()
            );
            ExitCode::SUCCESS
        }
        Command::Limit => {
            let file: ExperimentFile =
                serde_json::from_str(&raw).context("parsing experiment config")?;
            let mut cfg = file.build()?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let est = with_jobs(cli.jobs, || experiments::limit_integral(&cfg))?;
            let report = LimitReport {
                schema_version: SCHEMA_VERSION,
                command: "limit".to_string(),
                seed: cfg.seed,
                estimator: cfg.estimator,
                limit_estimate: est.value,
                stderr: est.stderr,
                deterministic_estimator: est.deterministic,
                work: est.work,
            };
            emit(cli, &report, None)?;
            eprintln!(
                "limit: ({:.6}, {:.6}) stderr {:.3e} in {:.2?}",
                report.limit_estimate.re,
                report.limit_estimate.im,
                report.stderr,
                started.elapsed()
            );
            ExitCode::SUCCESS
        }
        Command::Compare => {
            let file: ExperimentFile =
                serde_json::from_str(&raw).context("parsing experiment config")?;
            let tolerance = file
                .tolerance
                .ok_or_else(|| anyhow!("compare requires a tolerance field in the config"))?;
            let mut cfg = file.build()?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let report = with_jobs(cli.jobs, || experiments::compare(&cfg, tolerance, mode))?;
            let pass = report.verdict == experiments::Verdict::Pass;
            emit(cli, &report, Some(&report.checkpoints))?;
            for w in &report.hypothesis.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!(
                "compare: |avg - limit| = {:.3e} vs {:.3e} + 3*{:.3e} -> {:?} in {:.2?}",
                report.abs_difference,
                report.tolerance,
                report.stderr,
                report.verdict,
                started.elapsed()
            );
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    };
    Ok(code)
}

#[cfg(feature = "parallel")]
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(j) if j >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .expect("building worker pool")
            .install(f),
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<T>(jobs: Option<usize>, f: impl FnOnce() -> T) -> T {
    if jobs.map_or(false, |j| j > 1) {
        eprintln!("note: built without the parallel feature; --jobs ignored");
    }
    f()
}

/// Write the JSON report to --out (or stdout) and, when both an output
/// path and checkpoints exist, the CSV trace next to it.
fn emit<T: Serialize>(cli: &Cli, report: &T, trace: Option<&[Checkpoint]>) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    match &cli.out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir)?;
                }
            }
            fs::write(path, format!("{json}\n"))
                .with_context(|| format!("writing {}", path.display()))?;
            if let Some(rows) = trace {
                let csv_path = trace_path(path);
                fs::write(&csv_path, experiments::trace_csv(rows))
                    .with_context(|| format!("writing {}", csv_path.display()))?;
            }
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn trace_path(out: &Path) -> PathBuf {
    out.with_extension("trace.csv")
}
