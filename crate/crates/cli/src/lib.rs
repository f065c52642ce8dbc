//! Command-line front end for `optsample-core`: configuration files, CSV and
//! JSON outputs, run manifests and thread-parallel drivers.
//!
//! The `optsample` binary exposes four subcommands:
//!
//! - `points` optimizes a configuration and writes `points.csv` and
//!   `objective.json`;
//! - `experiment <config.json>` compares optimal and equally spaced points on
//!   random targets;
//! - `oracle` runs reference computations;
//! - `replay <manifest.json>` re-runs a recorded configuration.
//!
//! Every run writes a `manifest.json` next to its outputs. Exit status is 0
//! on success, 1 for usage errors and 2 for numerical or search failures.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod manifest;
pub mod parallel;

pub use error::{CliError, CliResult};
