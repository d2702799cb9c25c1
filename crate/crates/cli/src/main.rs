//! `causal`: seeded, reproducible experiments on the causal action principle.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
//! failure flags (outputs are still written).

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::{config_hash, Experiment, Format, ProfileConfig};
use crate::output::{write_atomic, Header};

/// Environment variable that fixes the worker thread count.
const THREADS_ENV: &str = "CAUSAL_THREADS";
const DEFAULT_OUT: &str = "results";

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl From<causal_core::Error> for Failure {
    fn from(e: causal_core::Error) -> Self {
        use causal_core::Error::*;
        match e {
            EigenFailure | LinearlyDependent { .. } | SingularForm => {
                Self::Numerical(e.to_string())
            }
            _ => Self::Config(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "causal",
    version,
    about = "Causal action principle experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// JSON experiment document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output_path`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format; overrides `format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the causal action on the sphere.
    SphereMinimize(Common),
    /// Minimize over a list of τ values.
    TauSweep(Common),
    /// Euler–Lagrange diagnostics of a given support.
    ElCheck(Common),
    /// Assemble the jet Laplacian and its locality table.
    Laplacian(Common),
    /// Symplectic form and surface-layer inner product over regions.
    SurfaceLayer(Common),
    /// Lattice wave functions, correlation operators and the toy action.
    LatticeDemo(Common),
    /// Pairwise causal relations of a support.
    Classify(Common),
    /// Angle → 𝒟, 𝓛 table of the sphere kernel.
    Profile {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn resolve<T: Experiment>(common: &Common, mut cfg: T) -> T {
    if let Some(seed) = common.seed {
        *cfg.seed_mut() = seed;
    }
    if let Some(out) = &common.out {
        *cfg.output_path_mut() = Some(out.clone());
    }
    if let Some(format) = common.format {
        *cfg.format_mut() = format;
    }
    cfg
}

fn required<T: Experiment>(common: &Common, command: &str) -> Result<T, Failure> {
    let path = common.config.as_deref().ok_or_else(|| {
        Failure::Config(format!(
            "usage: causal {command} --config <path> [--seed N] [--out DIR] [--format csv|json]"
        ))
    })?;
    Ok(resolve(common, config::load(path)?))
}

fn execute<T, F>(command: &str, mut cfg: T, run: F) -> Result<Vec<String>, Failure>
where
    T: Experiment + Clone,
    F: FnOnce(&T, &Header) -> Result<Outcome, Failure>,
{
    let header = Header {
        tool: "causal".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config_sha256: config_hash(command, &cfg),
        seed: *cfg.seed_mut(),
    };
    let out_dir = cfg
        .output_path_mut()
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let outcome = run(&cfg, &header)?;
    write_all(&out_dir, &outcome)?;
    Ok(outcome.flags)
}

fn write_all(dir: &Path, outcome: &Outcome) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
    for artifact in &outcome.artifacts {
        write_atomic(dir, artifact).map_err(|e| {
            Failure::Io(format!(
                "cannot write {}: {e}",
                dir.join(&artifact.name).display()
            ))
        })?;
        eprintln!("wrote {}", dir.join(&artifact.name).display());
    }
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        Failure::Config(format!(
            "{THREADS_ENV} must be a positive integer, got {value:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Io(e.to_string()))
}

fn dispatch(command: Command) -> Result<Vec<String>, Failure> {
    match command {
        Command::SphereMinimize(c) => execute(
            "sphere-minimize",
            required(&c, "sphere-minimize")?,
            commands::sphere_minimize,
        ),
        Command::TauSweep(c) => execute("tau-sweep", required(&c, "tau-sweep")?, commands::sweep),
        Command::ElCheck(c) => execute("el-check", required(&c, "el-check")?, commands::el_check),
        Command::Laplacian(c) => {
            execute("laplacian", required(&c, "laplacian")?, commands::laplacian)
        }
        Command::SurfaceLayer(c) => execute(
            "surface-layer",
            required(&c, "surface-layer")?,
            commands::surface_layer,
        ),
        Command::LatticeDemo(c) => execute(
            "lattice-demo",
            required(&c, "lattice-demo")?,
            commands::lattice_demo,
        ),
        Command::Classify(c) => execute("classify", required(&c, "classify")?, commands::classify),
        Command::Profile {
            common,
            tau,
            samples,
        } => {
            let mut cfg = match &common.config {
                Some(path) => config::load::<ProfileConfig>(path)?,
                None => ProfileConfig {
                    tau: tau.ok_or_else(|| {
                        Failure::Config("usage: causal profile --tau T [--samples N]".into())
                    })?,
                    samples: 181,
                    seed: 0,
                    output_path: None,
                    format: Format::Csv,
                },
            };
            if let Some(tau) = tau {
                cfg.tau = tau;
            }
            if let Some(samples) = samples {
                cfg.samples = samples;
            }
            execute("profile", resolve(&common, cfg), commands::kernel_profile)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| dispatch(cli.command));
    match result {
        Ok(flags) if flags.is_empty() => ExitCode::SUCCESS,
        Ok(flags) => {
            for flag in flags {
                eprintln!("warning: {flag}");
            }
            ExitCode::from(3)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
