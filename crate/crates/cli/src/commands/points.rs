use std::path::{Path, PathBuf};

use clap::Args;
use optsample_core::objective::DEFAULT_SEPARATION;
use optsample_core::rkhs::{phi_norm, PhiNorm};
use optsample_core::spectral::k_omega;
use optsample_core::ObjectiveSpec;
use serde::{Deserialize, Serialize};

use super::prepare_out;
use crate::config::{
    build_domain, check_tensor_count, parse_domain, parse_list, DomainBounds, KernelName, MeasureConfig, ObjectiveName,
    SearchSettings,
};
use crate::error::{CliError, CliResult};
use crate::format::{points_to_rows, read_points_csv, write_json, write_points_csv};
use crate::manifest::RunManifest;
use crate::parallel::optimize_points_par;

#[derive(Debug, Args)]
pub struct PointsArgs {
    #[arg(long, value_enum)]
    pub kernel: KernelArg,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Box `lo:hi[,lo:hi…]`, one range per axis.
    #[arg(long, allow_hyphen_values = true)]
    pub domain: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub objective: ObjectiveArg,
    /// Quadrature cells per axis, comma-separated (default 201 in 1D, 41 otherwise).
    #[arg(long)]
    pub grid: Option<String>,
    /// `lebesgue` for grid quadrature, or `nodes:<file.csv>` with columns x1… and optional weight.
    #[arg(long, default_value = "lebesgue")]
    pub measure: String,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub simplex_scale: Option<f64>,
    /// Minimum point separation (default 1e-6 times the domain diameter).
    #[arg(long)]
    pub separation: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum KernelArg {
    Gaussian,
    Sinc,
    Exponential,
}

impl From<KernelArg> for KernelName {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Gaussian => KernelName::Gaussian,
            KernelArg::Sinc => KernelName::Sinc,
            KernelArg::Exponential => KernelName::Exponential,
        }
    }
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ObjectiveArg {
    Trace,
    TraceSpectral,
    Subspace,
    Supnorm,
}

impl From<ObjectiveArg> for ObjectiveName {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Trace => ObjectiveName::Trace,
            ObjectiveArg::TraceSpectral => ObjectiveName::TraceSpectral,
            ObjectiveArg::Subspace => ObjectiveName::Subspace,
            ObjectiveArg::Supnorm => ObjectiveName::Supnorm,
        }
    }
}

/// Resolved `points` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsConfig {
    pub kernel: KernelName,
    pub dim: usize,
    pub domain: DomainBounds,
    pub n: usize,
    pub objective: ObjectiveName,
    pub measure: MeasureConfig,
    pub separation: f64,
    pub seed: u64,
    pub search: SearchSettings,
}

/// Grid resolution from `--grid`, or the default for `dim`.
pub(crate) fn grid_resolution(grid: Option<&str>, dim: usize) -> CliResult<Vec<usize>> {
    let res = match grid {
        Some(g) => parse_list::<usize>(g, "grid resolution")?,
        None => vec![if dim == 1 { 201 } else { 41 }; dim],
    };
    match res.len() {
        1 => Ok(vec![res[0]; dim]),
        l if l == dim => Ok(res),
        l => Err(CliError::usage(format!("--grid has {l} entries for dimension {dim}"))),
    }
}

/// `--measure` and `--grid` as a measure configuration.
pub(crate) fn measure_from_flags(measure: &str, grid: Option<&str>, dim: usize) -> CliResult<MeasureConfig> {
    if measure == "lebesgue" {
        return Ok(MeasureConfig::Grid { resolution: grid_resolution(grid, dim)? });
    }
    let Some(file) = measure.strip_prefix("nodes:") else {
        return Err(CliError::usage(format!("--measure `{measure}` is neither `lebesgue` nor `nodes:<file>`")));
    };
    if grid.is_some() {
        return Err(CliError::usage("--grid applies only to --measure lebesgue"));
    }
    let (nodes, weights) = read_points_csv(Path::new(file))?;
    if nodes.dim() != dim {
        return Err(CliError::usage(format!("{file}: nodes have dimension {}, expected {dim}", nodes.dim())));
    }
    Ok(MeasureConfig::Nodes { nodes: points_to_rows(&nodes), weights })
}

impl PointsArgs {
    pub fn resolve(&self) -> CliResult<PointsConfig> {
        let domain_bounds = parse_domain(&self.domain)?;
        let domain = build_domain(&domain_bounds, self.dim)?;
        check_tensor_count(self.n, self.dim)?;
        let mut search = SearchSettings {
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            simplex_scale: self.simplex_scale,
        };
        search.core(self.seed).validate().map_err(|e| CliError::usage(e.to_string()))?;
        search.resolve(self.n, &domain);
        Ok(PointsConfig {
            kernel: self.kernel.into(),
            dim: self.dim,
            domain: domain_bounds,
            n: self.n,
            objective: self.objective.into(),
            measure: measure_from_flags(&self.measure, self.grid.as_deref(), self.dim)?,
            separation: self.separation.unwrap_or(DEFAULT_SEPARATION * domain.diameter()),
            seed: self.seed,
            search,
        })
    }
}

#[derive(Serialize)]
struct SearchSummary {
    minimized_value: f64,
    starts_tried: usize,
    best_start_index: usize,
    converged: bool,
}

#[derive(Serialize)]
struct ObjectiveReport {
    kind: &'static str,
    /// Natural sign: the trace objectives are maximized, the others minimized.
    value: f64,
    k_omega: f64,
    phi_norm_2: f64,
    phi_norm_inf: f64,
    search: SearchSummary,
}

pub fn run_points_config(config: &PointsConfig, out: &Path) -> CliResult<()> {
    let kernel = config.kernel.kernel(config.dim)?;
    let domain = build_domain(&config.domain, config.dim)?;
    let measure = config.measure.build(&domain)?;
    let kind = config.objective.kind();
    let spec = ObjectiveSpec::new(kind, kernel, measure.clone(), domain, config.n)?
        .with_separation(config.separation)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let result = optimize_points_par(&spec, &config.search.core(config.seed))?;

    let report = ObjectiveReport {
        kind: kind.name(),
        value: kind.to_natural(result.objective_value),
        k_omega: k_omega(kernel, &measure)?,
        phi_norm_2: phi_norm(kernel, &result.points, &measure, PhiNorm::L2)?,
        phi_norm_inf: phi_norm(kernel, &result.points, &measure, PhiNorm::Sup)?,
        search: SearchSummary {
            minimized_value: result.objective_value,
            starts_tried: result.starts_tried,
            best_start_index: result.best_start_index,
            converged: result.converged,
        },
    };

    prepare_out(out)?;
    write_points_csv(&out.join("points.csv"), &result.points)?;
    write_json(&out.join("objective.json"), &report)?;
    RunManifest::new("points", config.seed, config, &["points.csv", "objective.json"])?.write(out)
}
