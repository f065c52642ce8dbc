//! Subcommands. Each one turns its flags into a resolved configuration and
//! runs it; `replay` runs a configuration read back from a manifest.

mod experiment;
mod oracle;
mod points;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use experiment::{run_experiment_config, ExperimentArgs};
pub use oracle::{run_oracle_config, OracleArgs, OracleConfig, OracleMode};
pub use points::{run_points_config, PointsArgs, PointsConfig};

use crate::config::ExperimentFile;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "optsample", version, about = "Optimal sampling points for kernel reconstruction")]
pub struct Cli {
    /// Worker threads (default: $OPTSAMPLE_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize a point configuration and write it with its objective.
    Points(PointsArgs),
    /// Compare optimal and equally spaced points on random targets.
    Experiment(ExperimentArgs),
    /// Reference computations: closed forms, exhaustive search, power function profiles.
    Oracle(OracleArgs),
    /// Re-run the configuration recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// A manifest.json written by an earlier run.
    pub manifest: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

pub(crate) fn prepare_out(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Runs a parsed command line on the current thread pool.
pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Points(args) => run_points_config(&args.resolve()?, &args.out),
        Command::Experiment(args) => run_experiment_config(&args.resolve()?, &args.out),
        Command::Oracle(args) => run_oracle_config(&args.resolve()?, &args.out),
        Command::Replay(args) => replay(&args.manifest, &args.out),
    }
}

pub fn replay(manifest: &Path, out: &Path) -> CliResult<()> {
    let m = RunManifest::read(manifest)?;
    match m.subcommand.as_str() {
        "points" => run_points_config(&m.config_as::<PointsConfig>()?, out),
        "experiment" => run_experiment_config(&m.config_as::<ExperimentFile>()?.resolve()?, out),
        "oracle" => run_oracle_config(&m.config_as::<OracleConfig>()?, out),
        other => Err(CliError::usage(format!("manifest names unknown subcommand `{other}`"))),
    }
}
