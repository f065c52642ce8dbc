//! Derivative-free search over point configurations.
//!
//! [`optimize_points`] runs bounded Nelder–Mead from several starts and keeps
//! the best; [`greedy_exchange`] and [`brute_force`] work on a finite
//! candidate set. Every start draws from its own random stream, so
//! [`run_start`] can be called in any order or in parallel and
//! [`reduce_starts`] produces the same result.

mod discrete;
mod simplex;

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::measure::PointSet;
use crate::objective::{Evaluation, ObjectiveSpec};

pub use discrete::{brute_force, greedy_exchange, BRUTE_FORCE_BUDGET};
pub use simplex::{run_start, start_configuration};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Number of starts; start 0 is the equally spaced configuration.
    pub restarts: usize,
    /// Iteration cap per start; `None` means `2000 · n · d`.
    pub max_iters: Option<usize>,
    /// Stop once the simplex value spread is below `tol · (1 + |f_best|)`.
    pub tol: f64,
    pub seed: u64,
    /// Initial simplex edge; `None` means a tenth of the domain diameter.
    pub simplex_scale: Option<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 20, max_iters: None, tol: 1e-10, seed: 0, simplex_scale: None }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(invalid("restarts must be positive"));
        }
        if self.max_iters == Some(0) {
            return Err(invalid("max_iters must be positive"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if let Some(s) = self.simplex_scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(invalid("simplex_scale must be positive"));
            }
        }
        Ok(())
    }

    pub fn resolved_max_iters(&self, spec: &ObjectiveSpec) -> usize {
        self.max_iters.unwrap_or(2000 * spec.n() * spec.dim())
    }

    pub fn resolved_simplex_scale(&self, spec: &ObjectiveSpec) -> f64 {
        self.simplex_scale.unwrap_or(0.1 * spec.domain().diameter())
    }

    /// Copy with every optional field filled in for `spec`.
    pub fn resolved(&self, spec: &ObjectiveSpec) -> SearchConfig {
        SearchConfig {
            max_iters: Some(self.resolved_max_iters(spec)),
            simplex_scale: Some(self.resolved_simplex_scale(spec)),
            ..self.clone()
        }
    }
}

/// Result of a single Nelder–Mead start.
#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome {
    pub start: usize,
    /// Best vertex, canonically sorted.
    pub points: PointSet,
    /// `points` re-evaluated after sorting.
    pub evaluation: Evaluation,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Lexicographically sorted configuration.
    pub points: PointSet,
    /// Objective at `points`, minimize convention (trace objectives negated).
    pub objective_value: f64,
    pub starts_tried: usize,
    pub best_start_index: usize,
    pub converged: bool,
    /// Discrete searches: chosen candidate indices, ascending. Empty otherwise.
    pub candidate_indices: Vec<usize>,
    /// Multistart: final value of each start. Greedy exchange: value before
    /// the first sweep and after every accepted swap. Brute force: empty.
    pub history: Vec<f64>,
}

/// Picks the best start: feasible before penalized, then smallest value,
/// then lowest start index.
pub fn reduce_starts(mut outcomes: Vec<StartOutcome>) -> Result<SearchResult> {
    if outcomes.is_empty() {
        return Err(invalid("no starts to reduce"));
    }
    outcomes.sort_by_key(|o| o.start);
    let history: Vec<f64> = outcomes.iter().map(|o| o.evaluation.value).collect();
    let starts_tried = outcomes.len();
    let best = outcomes
        .into_iter()
        .reduce(|best, o| if o.evaluation.cmp_key(&best.evaluation).is_lt() { o } else { best })
        .expect("nonempty");
    if best.evaluation.penalized {
        return Err(Error::SearchFailed { best_penalty: best.evaluation.value });
    }
    Ok(SearchResult {
        points: best.points,
        objective_value: best.evaluation.value,
        starts_tried,
        best_start_index: best.start,
        converged: best.converged,
        candidate_indices: Vec::new(),
        history,
    })
}

/// Multistart Nelder–Mead, run sequentially.
pub fn optimize_points(spec: &ObjectiveSpec, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let outcomes = (0..config.restarts).map(|s| run_start(spec, config, s)).collect::<Result<Vec<_>>>()?;
    reduce_starts(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::exp_two_point_optimal;
    use crate::kernel::Kernel;
    use crate::measure::{BoxDomain, Measure};
    use crate::objective::ObjectiveKind;

    fn supnorm_spec(kernel: Kernel, lo: f64, hi: f64, grid: usize, n: usize) -> ObjectiveSpec {
        let dom = BoxDomain::interval(lo, hi).unwrap();
        let mu = Measure::grid(&dom, &[grid]).unwrap();
        ObjectiveSpec::new(ObjectiveKind::Supnorm, kernel, mu, dom, n).unwrap()
    }

    #[test]
    fn single_gaussian_point_goes_to_center() {
        let spec = supnorm_spec(Kernel::gaussian(1), -3.0, 3.0, 201, 1);
        let r = optimize_points(&spec, &SearchConfig { restarts: 4, ..SearchConfig::default() }).unwrap();
        assert!(r.points.point(0)[0].abs() < 0.03, "{:?}", r.points);
    }

    #[test]
    fn exponential_pair_matches_closed_form() {
        let spec = supnorm_spec(Kernel::exponential(1), 0.0, 1.0, 400, 2);
        let r = optimize_points(&spec, &SearchConfig { restarts: 5, ..SearchConfig::default() }).unwrap();
        let opt = exp_two_point_optimal(0.0, 1.0).unwrap();
        assert!((r.points.point(0)[0] - opt.x1).abs() < 0.02, "{:?}", r.points);
        assert!((r.points.point(1)[0] - opt.x2).abs() < 0.02, "{:?}", r.points);
    }

    #[test]
    fn result_is_reproducible_and_consistent() {
        let dom = BoxDomain::interval(-2.0, 2.0).unwrap();
        let mu = Measure::grid(&dom, &[30]).unwrap();
        let spec = ObjectiveSpec::new(ObjectiveKind::Trace, Kernel::gaussian(1), mu, dom, 3).unwrap();
        let cfg = SearchConfig { restarts: 3, seed: 11, ..SearchConfig::default() };
        let a = optimize_points(&spec, &cfg).unwrap();
        let b = optimize_points(&spec, &cfg).unwrap();
        assert_eq!(a, b);
        let again = spec.evaluate(&a.points).unwrap();
        assert!((again.value - a.objective_value).abs() <= 1e-12);
        // never worse than the equally spaced start
        let equ = spec.evaluate(&start_configuration(&spec, &cfg, 0).unwrap()).unwrap();
        assert!(a.objective_value <= equ.value);
        // reduction is order independent
        let mut outs: Vec<StartOutcome> = (0..3).map(|s| run_start(&spec, &cfg, s).unwrap()).collect();
        outs.reverse();
        assert_eq!(reduce_starts(outs).unwrap(), a);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let spec = supnorm_spec(Kernel::gaussian(1), -1.0, 1.0, 20, 1);
        for cfg in [
            SearchConfig { restarts: 0, ..SearchConfig::default() },
            SearchConfig { tol: 0.0, ..SearchConfig::default() },
            SearchConfig { simplex_scale: Some(-1.0), ..SearchConfig::default() },
        ] {
            assert!(matches!(optimize_points(&spec, &cfg), Err(Error::InvalidArgument(_))));
        }
    }

    #[test]
    fn all_penalized_starts_fail() {
        // separation larger than the domain makes every pair infeasible
        let dom = BoxDomain::interval(0.0, 1.0).unwrap();
        let mu = Measure::grid(&dom, &[10]).unwrap();
        let spec = ObjectiveSpec::new(ObjectiveKind::Supnorm, Kernel::gaussian(1), mu, dom, 2)
            .unwrap()
            .with_separation(5.0)
            .unwrap();
        let cfg = SearchConfig { restarts: 2, max_iters: Some(50), ..SearchConfig::default() };
        assert!(matches!(optimize_points(&spec, &cfg), Err(Error::SearchFailed { .. })));
    }
}
