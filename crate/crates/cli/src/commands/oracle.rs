use std::path::{Path, PathBuf};

use clap::Args;
use optsample_core::bench::equally_spaced;
use optsample_core::closedform::{exp_two_point_optimal, supmin_v_bruteforce, TwoPointSolution};
use optsample_core::objective::DEFAULT_SEPARATION;
use optsample_core::optimize::{brute_force, greedy_exchange, SearchResult};
use optsample_core::rkhs::power_function_batch;
use optsample_core::{ObjectiveKind, ObjectiveSpec, PointSet};
use serde::{Deserialize, Serialize};

use super::points::{measure_from_flags, KernelArg, ObjectiveArg};
use super::prepare_out;
use crate::config::{build_domain, parse_domain, parse_list, DomainBounds, KernelName, MeasureConfig, ObjectiveName};
use crate::error::{CliError, CliResult};
use crate::format::{
    coordinate_names, fmt_f64, points_to_rows, read_points_csv, rows_to_points, write_csv, write_json,
};
use crate::manifest::RunManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleMode {
    /// Closed-form exponential-kernel pair against a grid sup–min search.
    Exp2pt,
    /// Exhaustive optimum over a candidate set.
    Bruteforce,
    /// Samples of the power function of a point set.
    PhiProfile,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub mode: OracleMode,
    /// Box `lo:hi[,lo:hi…]`; a single interval for exp2pt.
    #[arg(long, allow_hyphen_values = true)]
    pub domain: String,
    /// exp2pt: points of the search grid (default 400). bruteforce: quadrature cells per axis.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
    #[arg(long, default_value = "lebesgue")]
    pub measure: String,
    /// bruteforce: number of equally spaced candidates (default 8).
    #[arg(long)]
    pub candidates: Option<usize>,
    /// bruteforce: candidate points from a CSV with columns x1….
    #[arg(long, conflicts_with = "candidates")]
    pub candidates_file: Option<PathBuf>,
    /// bruteforce: also run greedy exchange on the same candidates.
    #[arg(long)]
    pub greedy: bool,
    #[arg(long, default_value_t = 100)]
    pub sweeps: usize,
    #[arg(long)]
    pub separation: Option<f64>,
    /// phi-profile: sampling points from a CSV with columns x1….
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// phi-profile: one-dimensional sampling points, comma-separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "points")]
    pub at: Option<String>,
    /// phi-profile: samples per axis (default 201 in 1D, 41 otherwise).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Resolved `oracle` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleConfig {
    Exp2pt {
        a: f64,
        b: f64,
        grid: usize,
    },
    Bruteforce {
        kernel: KernelName,
        dim: usize,
        domain: DomainBounds,
        n: usize,
        objective: ObjectiveName,
        measure: MeasureConfig,
        separation: f64,
        candidates: Vec<Vec<f64>>,
        greedy: bool,
        sweeps: usize,
    },
    PhiProfile {
        kernel: KernelName,
        dim: usize,
        domain: DomainBounds,
        points: Vec<Vec<f64>>,
        samples: usize,
    },
}

fn required<T: Copy>(v: Option<T>, flag: &str, mode: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::usage(format!("--mode {mode} needs --{flag}")))
}

impl OracleArgs {
    pub fn resolve(&self) -> CliResult<OracleConfig> {
        let bounds = parse_domain(&self.domain)?;
        match self.mode {
            OracleMode::Exp2pt => {
                if bounds.len() != 1 {
                    return Err(CliError::usage("exp2pt needs a one-dimensional --domain a:b"));
                }
                let grid = match &self.grid {
                    Some(g) => g.trim().parse::<usize>().map_err(|_| CliError::usage("--grid must be a count"))?,
                    None => 400,
                };
                if grid < 50 {
                    return Err(CliError::usage("exp2pt needs --grid of at least 50"));
                }
                let [a, b] = bounds[0];
                if a >= b {
                    return Err(CliError::usage("exp2pt needs a < b"));
                }
                Ok(OracleConfig::Exp2pt { a, b, grid })
            }
            OracleMode::Bruteforce => {
                let domain = build_domain(&bounds, self.dim)?;
                let n = required(self.n, "n", "bruteforce")?;
                let candidates = match &self.candidates_file {
                    Some(f) => read_points_csv(f)?.0,
                    None => equally_spaced(&domain, self.candidates.unwrap_or(8))
                        .map_err(|e| CliError::usage(e.to_string()))?,
                };
                if candidates.dim() != self.dim {
                    return Err(CliError::usage("candidate dimension does not match --dim"));
                }
                Ok(OracleConfig::Bruteforce {
                    kernel: required(self.kernel, "kernel", "bruteforce")?.into(),
                    dim: self.dim,
                    n,
                    objective: required(self.objective, "objective", "bruteforce")?.into(),
                    measure: measure_from_flags(&self.measure, self.grid.as_deref(), self.dim)?,
                    separation: self.separation.unwrap_or(DEFAULT_SEPARATION * domain.diameter()),
                    domain: bounds,
                    candidates: points_to_rows(&candidates),
                    greedy: self.greedy,
                    sweeps: self.sweeps,
                })
            }
            OracleMode::PhiProfile => {
                build_domain(&bounds, self.dim)?;
                let points = match (&self.points, &self.at) {
                    (Some(f), _) => read_points_csv(f)?.0,
                    (None, Some(at)) => {
                        if self.dim != 1 {
                            return Err(CliError::usage("--at lists one-dimensional points; use --points"));
                        }
                        PointSet::from_1d(&parse_list::<f64>(at, "coordinate")?)
                            .map_err(|e| CliError::usage(e.to_string()))?
                    }
                    (None, None) => return Err(CliError::usage("--mode phi-profile needs --points or --at")),
                };
                let samples = self.samples.unwrap_or(if self.dim == 1 { 201 } else { 41 });
                if samples < 2 {
                    return Err(CliError::usage("--samples must be at least 2"));
                }
                Ok(OracleConfig::PhiProfile {
                    kernel: required(self.kernel, "kernel", "phi-profile")?.into(),
                    dim: self.dim,
                    domain: bounds,
                    points: points_to_rows(&points),
                    samples,
                })
            }
        }
    }
}

#[derive(Serialize)]
struct PairReport {
    x1: f64,
    x2: f64,
    value: f64,
}

impl From<TwoPointSolution> for PairReport {
    fn from(s: TwoPointSolution) -> Self {
        Self { x1: s.x1, x2: s.x2, value: s.value }
    }
}

#[derive(Serialize)]
struct Exp2ptReport {
    a: f64,
    b: f64,
    grid: usize,
    grid_step: f64,
    closed_form: PairReport,
    grid_optimum: PairReport,
    /// Largest coordinate difference between the two pairs.
    gap: f64,
    gap_steps: f64,
}

#[derive(Serialize)]
struct DiscreteReport {
    indices: Vec<usize>,
    points: Vec<Vec<f64>>,
    /// Natural sign.
    value: f64,
}

impl DiscreteReport {
    fn new(r: &SearchResult, kind: ObjectiveKind) -> Self {
        Self {
            indices: r.candidate_indices.clone(),
            points: points_to_rows(&r.points),
            value: kind.to_natural(r.objective_value),
        }
    }
}

#[derive(Serialize)]
struct BruteforceReport {
    objective: &'static str,
    candidates: usize,
    n: usize,
    optimum: DiscreteReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    greedy: Option<GreedyReport>,
}

#[derive(Serialize)]
struct GreedyReport {
    result: DiscreteReport,
    swaps: usize,
    converged: bool,
    matches_optimum: bool,
}

pub fn run_oracle_config(config: &OracleConfig, out: &Path) -> CliResult<()> {
    match config {
        OracleConfig::Exp2pt { a, b, grid } => {
            let exact = exp_two_point_optimal(*a, *b)?;
            let found = supmin_v_bruteforce(*a, *b, *grid)?;
            let step = (b - a) / (*grid - 1) as f64;
            let gap = (exact.x1 - found.x1).abs().max((exact.x2 - found.x2).abs());
            let report = Exp2ptReport {
                a: *a,
                b: *b,
                grid: *grid,
                grid_step: step,
                closed_form: exact.into(),
                grid_optimum: found.into(),
                gap,
                gap_steps: gap / step,
            };
            prepare_out(out)?;
            write_json(&out.join("exp2pt.json"), &report)?;
            RunManifest::new("oracle", 0, config, &["exp2pt.json"])?.write(out)
        }
        OracleConfig::Bruteforce {
            kernel,
            dim,
            domain,
            n,
            objective,
            measure,
            separation,
            candidates,
            greedy,
            sweeps,
        } => {
            let kernel = kernel.kernel(*dim)?;
            let domain = build_domain(domain, *dim)?;
            let measure = measure.build(&domain)?;
            let kind = objective.kind();
            let cands = rows_to_points(candidates, *dim)?;
            let spec = ObjectiveSpec::new(kind, kernel, measure, domain, *n)?
                .with_separation(*separation)
                .map_err(|e| CliError::usage(e.to_string()))?;
            let best = brute_force(&spec, &cands)?;
            let greedy = if *greedy {
                let g = greedy_exchange(&spec, &cands, *sweeps)?;
                Some(GreedyReport {
                    swaps: g.history.len() - 1,
                    converged: g.converged,
                    matches_optimum: g.candidate_indices == best.candidate_indices,
                    result: DiscreteReport::new(&g, kind),
                })
            } else {
                None
            };
            let report = BruteforceReport {
                objective: kind.name(),
                candidates: cands.len(),
                n: *n,
                optimum: DiscreteReport::new(&best, kind),
                greedy,
            };
            prepare_out(out)?;
            write_json(&out.join("bruteforce.json"), &report)?;
            RunManifest::new("oracle", 0, config, &["bruteforce.json"])?.write(out)
        }
        OracleConfig::PhiProfile { kernel, dim, domain, points, samples } => {
            let kernel = kernel.kernel(*dim)?;
            let domain = build_domain(domain, *dim)?;
            let x = rows_to_points(points, *dim)?;
            let grid = equally_spaced(&domain, samples.pow(*dim as u32))?;
            let merged = grid.concat(&x)?.sorted();
            let mut rows = points_to_rows(&merged);
            rows.dedup();
            let queries = rows_to_points(&rows, *dim)?;
            let phi = power_function_batch(kernel, &x, &queries)?;

            let mut header = match dim {
                1 => vec!["x".to_string()],
                2 => vec!["x".to_string(), "y".to_string()],
                d => coordinate_names(*d),
            };
            header.push("phi".to_string());
            let rows = queries.iter().zip(&phi).map(|(q, v)| {
                let mut row: Vec<String> = q.iter().map(|c| fmt_f64(*c)).collect();
                row.push(fmt_f64(*v));
                row
            });
            prepare_out(out)?;
            write_csv(&out.join("phi_profile.csv"), &header, rows)?;
            RunManifest::new("oracle", 0, config, &["phi_profile.csv"])?.write(out)
        }
    }
}
