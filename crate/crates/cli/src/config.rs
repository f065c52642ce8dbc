//! Serializable run configurations. Every optional setting is filled in
//! before a run starts, and the filled-in form is what manifests record.

use optsample_core::bench::{ErrorMeasure, ExperimentConfig, MeasureSpec, TargetSpec};
use optsample_core::optimize::SearchConfig;
use optsample_core::{BoxDomain, Kernel, KernelFamily, Measure, ObjectiveKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::format::rows_to_points;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelName {
    Gaussian,
    Sinc,
    Exponential,
}

impl KernelName {
    pub fn family(self) -> KernelFamily {
        match self {
            KernelName::Gaussian => KernelFamily::Gaussian,
            KernelName::Sinc => KernelFamily::Sinc,
            KernelName::Exponential => KernelFamily::Exponential,
        }
    }

    pub fn kernel(self, dim: usize) -> CliResult<Kernel> {
        Kernel::new(self.family(), dim).map_err(|e| CliError::usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveName {
    Trace,
    TraceSpectral,
    Subspace,
    Supnorm,
}

impl ObjectiveName {
    pub fn kind(self) -> ObjectiveKind {
        match self {
            ObjectiveName::Trace => ObjectiveKind::Trace,
            ObjectiveName::TraceSpectral => ObjectiveKind::TraceSpectral,
            ObjectiveName::Subspace => ObjectiveKind::Subspace,
            ObjectiveName::Supnorm => ObjectiveKind::Supnorm,
        }
    }
}

/// Per-axis `[lo, hi]` bounds.
pub type DomainBounds = Vec<[f64; 2]>;

pub fn build_domain(bounds: &DomainBounds, dim: usize) -> CliResult<BoxDomain> {
    if bounds.len() != dim {
        return Err(CliError::usage(format!("domain has {} axes but dim is {dim}", bounds.len())));
    }
    BoxDomain::new(bounds.iter().map(|b| b[0]).collect(), bounds.iter().map(|b| b[1]).collect())
        .map_err(|e| CliError::usage(e.to_string()))
}

/// Parses `lo:hi[,lo:hi…]`.
pub fn parse_domain(text: &str) -> CliResult<DomainBounds> {
    text.split(',')
        .map(|axis| {
            let (lo, hi) = axis
                .split_once(':')
                .ok_or_else(|| CliError::usage(format!("domain axis `{axis}` is not of the form lo:hi")))?;
            let num = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| CliError::usage(format!("`{s}` in domain is not a number")))
            };
            Ok([num(lo)?, num(hi)?])
        })
        .collect()
}

/// Parses a comma-separated list.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| CliError::usage(format!("`{s}` is not a valid {what}"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureConfig {
    /// Midpoint quadrature of Lebesgue measure, `resolution` cells per axis.
    Grid { resolution: Vec<usize> },
    /// Uniform probability on `count` equally spaced nodes.
    EquispacedNodes { count: usize },
    /// Explicit nodes, uniform weights unless given.
    Nodes {
        nodes: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
}

impl MeasureConfig {
    pub fn spec(&self, dim: usize) -> CliResult<MeasureSpec> {
        Ok(match self {
            MeasureConfig::Grid { resolution } => MeasureSpec::Grid { resolution: resolution.clone() },
            MeasureConfig::EquispacedNodes { count } => MeasureSpec::EquispacedNodes { count: *count },
            MeasureConfig::Nodes { nodes, weights } => {
                MeasureSpec::Discrete { nodes: rows_to_points(nodes, dim)?, weights: weights.clone() }
            }
        })
    }

    pub fn build(&self, domain: &BoxDomain) -> CliResult<Measure> {
        self.spec(domain.dim())?.build(domain).map_err(|e| CliError::usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ErrorMeasureConfig {
    #[default]
    Same,
    Refined {
        #[serde(default = "default_refine")]
        factor: usize,
    },
}

fn default_refine() -> usize {
    4
}

impl ErrorMeasureConfig {
    fn core(self) -> ErrorMeasure {
        match self {
            ErrorMeasureConfig::Same => ErrorMeasure::SameAsObjective,
            ErrorMeasureConfig::Refined { factor } => ErrorMeasure::Refined { factor },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    #[serde(default = "default_terms_min")]
    pub terms_min: usize,
    #[serde(default = "default_terms_max")]
    pub terms_max: usize,
    #[serde(default = "default_coeff_range")]
    pub coeff_range: [f64; 2],
}

fn default_terms_min() -> usize {
    TargetSpec::default().terms_min
}

fn default_terms_max() -> usize {
    TargetSpec::default().terms_max
}

fn default_coeff_range() -> [f64; 2] {
    let t = TargetSpec::default();
    [t.coeff_lo, t.coeff_hi]
}

impl Default for TargetConfig {
    fn default() -> Self {
        Self { terms_min: default_terms_min(), terms_max: default_terms_max(), coeff_range: default_coeff_range() }
    }
}

impl TargetConfig {
    fn core(&self) -> TargetSpec {
        TargetSpec {
            terms_min: self.terms_min,
            terms_max: self.terms_max,
            coeff_lo: self.coeff_range[0],
            coeff_hi: self.coeff_range[1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSettings {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub simplex_scale: Option<f64>,
}

fn default_restarts() -> usize {
    SearchConfig::default().restarts
}

fn default_tol() -> f64 {
    SearchConfig::default().tol
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self { restarts: default_restarts(), max_iters: None, tol: default_tol(), simplex_scale: None }
    }
}

impl SearchSettings {
    pub fn core(&self, seed: u64) -> SearchConfig {
        SearchConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            seed,
            simplex_scale: self.simplex_scale,
        }
    }

    /// Fills in the iteration cap and simplex scale for `n` points in `domain`.
    pub fn resolve(&mut self, n: usize, domain: &BoxDomain) {
        self.max_iters.get_or_insert(2000 * n * domain.dim());
        self.simplex_scale.get_or_insert(0.1 * domain.diameter());
    }
}

/// `experiment` configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub kernel: KernelName,
    pub dim: usize,
    pub domain: DomainBounds,
    pub n: usize,
    pub objective: ObjectiveName,
    pub measure: MeasureConfig,
    #[serde(default)]
    pub error_measure: ErrorMeasureConfig,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub target: TargetConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub search: SearchSettings,
}

fn default_trials() -> usize {
    100
}

impl ExperimentFile {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::usage(format!("experiment config: {e}")))
    }

    /// Checks the configuration and fills in every default.
    pub fn resolve(mut self) -> CliResult<Self> {
        let domain = build_domain(&self.domain, self.dim)?;
        check_tensor_count(self.n, self.dim)?;
        self.search.resolve(self.n, &domain);
        let resolved = self.clone();
        resolved.core()?;
        Ok(resolved)
    }

    pub fn core(&self) -> CliResult<ExperimentConfig> {
        let kernel = self.kernel.kernel(self.dim)?;
        let domain = build_domain(&self.domain, self.dim)?;
        let config = ExperimentConfig {
            kernel,
            domain,
            n: self.n,
            objective: self.objective.kind(),
            measure: self.measure.spec(self.dim)?,
            error_measure: self.error_measure.core(),
            trials: self.trials,
            target: self.target.core(),
            seed: self.seed,
            search: self.search.core(self.seed),
        };
        config.validate().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(config)
    }
}

/// The equally spaced start and baseline need `n = k^d`.
pub fn check_tensor_count(n: usize, dim: usize) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::usage("n must be positive"));
    }
    let k = (n as f64).powf(1.0 / dim as f64).round() as usize;
    if (k.saturating_sub(1)..=k + 1).any(|k| k.checked_pow(dim as u32) == Some(n)) {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "n = {n} is not a perfect power of dim = {dim}; equally spaced points need n = k^dim"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_experiment_file_gets_defaults() {
        let text = r#"{"kernel":"gaussian","dim":1,"domain":[[-3,3]],"n":6,"objective":"trace",
                      "measure":{"type":"grid","resolution":[121]}}"#;
        let f = ExperimentFile::from_json(text).unwrap().resolve().unwrap();
        assert_eq!(f.trials, 100);
        assert_eq!(f.search.restarts, 20);
        assert_eq!(f.search.max_iters, Some(12000));
        assert!((f.search.simplex_scale.unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(f.target, TargetConfig::default());
        let again = ExperimentFile::from_json(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn unknown_keys_are_named() {
        let text = r#"{"kernel":"gaussian","dim":1,"domain":[[-3,3]],"n":6,"objective":"trace",
                      "measure":{"type":"grid","resolution":[121]},"trails":5}"#;
        let err = ExperimentFile::from_json(text).unwrap_err().to_string();
        assert!(err.contains("trails"), "{err}");
        let nested = r#"{"kernel":"gaussian","dim":1,"domain":[[-3,3]],"n":6,"objective":"trace",
                      "measure":{"type":"grid","resolution":[121]},"search":{"restart":3}}"#;
        assert!(ExperimentFile::from_json(nested).unwrap_err().to_string().contains("restart"));
    }

    #[test]
    fn domain_and_lists_parse() {
        assert_eq!(parse_domain("-3:3").unwrap(), vec![[-3.0, 3.0]]);
        assert_eq!(parse_domain("0:1,0:4").unwrap(), vec![[0.0, 1.0], [0.0, 4.0]]);
        assert!(parse_domain("0-1").is_err());
        assert_eq!(parse_list::<usize>("4, 5", "count").unwrap(), vec![4, 5]);
        assert!(check_tensor_count(25, 2).is_ok());
        assert!(check_tensor_count(24, 2).is_err());
        assert!(check_tensor_count(7, 1).is_ok());
    }
}
