//! `sgl` — reproducible experiments on the stochastic Ginzburg-Landau
//! equation driven by cylindrical alpha-stable noise.
//!
//! Every subcommand reads one JSON config (all blocks optional, with a
//! documented default preset), derives all randomness from a single master
//! seed, and writes CSV data plus `summary.json` and `manifest.json` into
//! `--out`. With `--threads 1` reruns are byte-identical on the data files.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::Config;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sgl", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and record norms along it
    Simulate(RunArgs),
    /// Check the stable sampler law and the noise spectrum
    NoiseTest(RunArgs),
    /// Synthesize a steering control and verify reachability
    Control(RunArgs),
    /// Certify the Lyapunov drift condition on sampled states
    Drift(RunArgs),
    /// Fit the contraction rate between two ensembles
    Ergodic(RunArgs),
    /// Moderate-deviation functional: scaling, variance, and tails
    Mdp(RunArgs),
    /// List config violations and warnings without computing anything
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration (omitted: the default preset)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 1 (the default) is the reproducibility contract
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Output directory for CSV, summary.json, and manifest.json
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// JSON run configuration to check
    #[arg(long)]
    config: PathBuf,
}

/// Exit classes: validation failures (2) and numeric aborts (3).
pub enum Failure {
    Validation(String),
    Numeric(String),
    Io(anyhow::Error),
}

impl From<sgl_core::Error> for Failure {
    fn from(e: sgl_core::Error) -> Self {
        match e {
            sgl_core::Error::Overflow { .. } | sgl_core::Error::InsufficientData { .. } => {
                Failure::Numeric(e.to_string())
            }
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric abort: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate(args) => commands::validate::run(&args.config),
        Command::Simulate(args) => prepared(args, "simulate", commands::simulate::run),
        Command::NoiseTest(args) => prepared(args, "noise-test", commands::noise_test::run),
        Command::Control(args) => prepared(args, "control", commands::control::run),
        Command::Drift(args) => prepared(args, "drift", commands::drift::run),
        Command::Ergodic(args) => prepared(args, "ergodic", commands::ergodic::run),
        Command::Mdp(args) => prepared(args, "mdp", commands::mdp::run),
    }
}

/// Shared preflight: load + validate the config, pin the thread pool, run
/// the command, then close the manifest.
fn prepared(
    args: RunArgs,
    name: &'static str,
    body: fn(&Config, &mut output::Artifacts) -> Result<(), Failure>,
) -> Result<(), Failure> {
    let mut cfg = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }

    let diag = config::validate(&cfg);
    for w in &diag.warnings {
        eprintln!("warning: {w}");
    }
    if !diag.violations.is_empty() {
        for v in &diag.violations {
            eprintln!("violation: {v}");
        }
        return Err(Failure::Validation(format!(
            "{} config violation(s)",
            diag.violations.len()
        )));
    }

    if args.threads == 0 {
        return Err(Failure::Validation("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build_global()
        .map_err(|e| Failure::Validation(format!("thread pool: {e}")))?;

    let mut artifacts = output::Artifacts::new(&args.out)?;
    body(&cfg, &mut artifacts)?;
    artifacts.finish(name, &cfg, cfg.seed, args.threads)?;
    Ok(())
}

fn load_config(path: Option<&std::path::Path>) -> Result<Config, Failure> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::Validation(format!("cannot read config {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Validation(format!("config {}: {e}", path.display())))
}
