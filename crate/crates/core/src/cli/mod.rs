//! Command-line orchestration: config parsing, the five commands, and
//! report and plot emission.
//!
//! Exit codes: `0` when every check of the command passed, `1` when a check
//! failed or a numerical step broke down, `2` for unusable input (malformed
//! config, invalid problem, bad flags). Failures that abort a command leave
//! a `failure.json` record in the output directory.

mod commands;
mod config;
mod report;
pub mod svg;

pub use commands::{
    cmd_distance, cmd_ergodic, cmd_norms, cmd_solve, cmd_sweep, error_kind, sweep_instances, theory, write_failure,
    Instance, Theory, Verdict, ALPHA_GATE, C0_GATE, ERGODIC_GATE, TRANSFORM_DELTA, TRANSFORM_GATE,
};
pub use config::{ProblemConfig, RunConfig, Schedules, SweepConfig, Tolerances};
pub use report::{write_json, SCHEMA_VERSION};

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "finsler-blowup", version, about = "Blow-up solutions and ergodic constants for Finsler-Laplacian equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML config (JSON if the extension is .json); defaults apply when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory [default: config `out`, else ./out].
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads [default: available cores].
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    /// Seed for randomized inputs; overrides the config.
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Norm identity suite and structural constants.
    Norms,
    /// Anisotropic distance against the brute-force oracle.
    Distance,
    /// Blow-up sweep, rate fit, barrier sandwich, gradient diagnostic.
    Solve,
    /// Ergodic constant by continuation (and Rayleigh descent for q = 2).
    Ergodic,
    /// Solve pipeline over the (q, norm, resolution) grid of the config.
    Sweep {
        /// Skip run directories that already hold a complete report.
        #[arg(long)]
        resume: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Norms => "norms",
            Command::Distance => "distance",
            Command::Solve => "solve",
            Command::Ergodic => "ergodic",
            Command::Sweep { .. } => "sweep",
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match error_kind(e) {
        "usage" => 2,
        _ => 1,
    }
}

/// Runs one command with a resolved config and output directory.
pub fn execute(command: Command, config: &RunConfig, out: &Path, workers: usize) -> Result<Verdict> {
    match command {
        Command::Norms => cmd_norms(config, out),
        Command::Distance => cmd_distance(config, out),
        Command::Solve => cmd_solve(config, out),
        Command::Ergodic => cmd_ergodic(config, out),
        Command::Sweep { resume } => cmd_sweep(config, out, workers, resume),
    }
}

fn resolve(cli: &Cli) -> Result<(RunConfig, PathBuf)> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let out = cli.out.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    Ok((config, out))
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let name = cli.command.name();
    let workers = cli
        .workers
        .map(|w| w as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let (config, out) = match resolve(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let _ = write_failure(&out, name, &e);
            return exit_code(&e);
        }
    };
    match execute(cli.command, &config, &out, workers) {
        Ok(verdict) => {
            println!("{}", verdict.summary);
            if verdict.passed() {
                println!("{name}: pass");
                0
            } else {
                println!("{name}: FAIL ({})", verdict.failures.join(", "));
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Err(w) = write_failure(&out, name, &e) {
                eprintln!("error: cannot write failure record: {w}");
            }
            exit_code(&e)
        }
    }
}
