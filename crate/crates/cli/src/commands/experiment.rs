use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use super::prepare_out;
use crate::config::ExperimentFile;
use crate::error::{CliError, CliResult};
use crate::format::{fmt_f64, points_to_rows, write_csv, write_json, write_points_csv};
use crate::manifest::RunManifest;
use crate::parallel::run_experiment_par;

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON configuration; see the README for its keys.
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

impl ExperimentArgs {
    pub fn resolve(&self) -> CliResult<ExperimentFile> {
        let text =
            fs::read_to_string(&self.config).map_err(|e| CliError::usage(format!("{}: {e}", self.config.display())))?;
        ExperimentFile::from_json(&text)?.resolve()
    }
}

#[derive(Serialize)]
struct ObjectiveValues {
    kind: &'static str,
    value_opt: f64,
    value_equ: f64,
}

#[derive(Serialize)]
struct Summary {
    trials: usize,
    mean_improvement: f64,
    std_improvement: f64,
    count_opt_worse: usize,
    redraws: usize,
    objective: ObjectiveValues,
    points_opt: Vec<Vec<f64>>,
    points_equ: Vec<Vec<f64>>,
}

pub fn run_experiment_config(config: &ExperimentFile, out: &Path) -> CliResult<()> {
    let report = run_experiment_par(config.core()?)?;
    let kind = report.config.objective;

    prepare_out(out)?;
    let header = |cols: &[&str]| cols.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    write_csv(
        &out.join("errors.csv"),
        &header(&["trial", "e_opt", "e_equ"]),
        report.trials.iter().map(|t| vec![t.trial.to_string(), fmt_f64(t.e_opt), fmt_f64(t.e_equ)]),
    )?;
    write_csv(
        &out.join("plotdata_errors.csv"),
        &header(&["trial", "e_equ", "e_opt", "improvement"]),
        report
            .trials
            .iter()
            .map(|t| vec![t.trial.to_string(), fmt_f64(t.e_equ), fmt_f64(t.e_opt), fmt_f64(t.e_equ - t.e_opt)]),
    )?;
    write_points_csv(&out.join("points_opt.csv"), &report.points_opt)?;
    write_points_csv(&out.join("points_equ.csv"), &report.points_equ)?;
    let summary = Summary {
        trials: report.trials.len(),
        mean_improvement: report.mean_improvement,
        std_improvement: report.std_improvement,
        count_opt_worse: report.count_opt_worse,
        redraws: report.trials.iter().map(|t| t.redraws).sum(),
        objective: ObjectiveValues {
            kind: kind.name(),
            value_opt: kind.to_natural(report.search.objective_value),
            value_equ: kind.to_natural(report.objective_equ),
        },
        points_opt: points_to_rows(&report.points_opt),
        points_equ: points_to_rows(&report.points_equ),
    };
    write_json(&out.join("summary.json"), &summary)?;
    RunManifest::new(
        "experiment",
        config.seed,
        config,
        &["errors.csv", "summary.json", "points_opt.csv", "points_equ.csv", "plotdata_errors.csv"],
    )?
    .write(out)
}
