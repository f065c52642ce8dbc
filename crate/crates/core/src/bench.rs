//! Reconstruction experiments: optimal points against the equally spaced
//! baseline on random kernel expansions.
//!
//! [`run_experiment`] is the sequential driver. Parallel drivers build an
//! [`ExperimentPlan`], optimize its spec, call
//! [`ExperimentPlan::run_trial`] for every trial in any order and pass the
//! outcomes to [`ExperimentPlan::finish`].

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::kernel::Kernel;
use crate::measure::{BoxDomain, Measure, PointSet};
use crate::objective::{ObjectiveKind, ObjectiveSpec};
use crate::optimize::{self, SearchConfig, SearchResult};
use crate::rkhs::{min_norm_interpolant, Expansion};
use crate::rng;

/// Targets with an `L²` norm at or below this are redrawn.
pub const DEGENERATE_NORM: f64 = 1e-14;

/// Redraws allowed per trial before the experiment fails.
pub const MAX_REDRAWS: usize = 100;

/// Integer `k` with `k^d = n`, if any.
fn integer_root(n: usize, d: usize) -> Option<usize> {
    let guess = libm::round(libm::pow(n as f64, 1.0 / d as f64)) as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|k| k.checked_pow(d as u32) == Some(n))
}

fn axis_points(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return alloc::vec![0.5 * (lo + hi)];
    }
    (0..k).map(|i| if i + 1 == k { hi } else { lo + (hi - lo) * i as f64 / (k - 1) as f64 }).collect()
}

/// Endpoint-inclusive equally spaced points; a tensor grid with `k` points
/// per axis when `n = k^d`. A single point sits at the center.
pub fn equally_spaced(domain: &BoxDomain, n: usize) -> Result<PointSet> {
    if n == 0 {
        return Err(invalid("point count must be positive"));
    }
    let d = domain.dim();
    let k =
        integer_root(n, d).ok_or_else(|| invalid(format!("{n} points do not form a tensor grid in dimension {d}")))?;
    let axes: Vec<Vec<f64>> = (0..d).map(|i| axis_points(domain.lo()[i], domain.hi()[i], k)).collect();
    let mut coords = Vec::with_capacity(n * d);
    let mut idx = alloc::vec![0usize; d];
    for _ in 0..n {
        coords.extend((0..d).map(|i| axes[i][idx[i]]));
        for axis in (0..d).rev() {
            idx[axis] += 1;
            if idx[axis] < k {
                break;
            }
            idx[axis] = 0;
        }
    }
    PointSet::new(d, coords)
}

/// Distribution of random targets `f = Σ_j c_j K(z_j, ·)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub terms_min: usize,
    pub terms_max: usize,
    /// Coefficients are uniform on `[coeff_lo, coeff_hi]`.
    pub coeff_lo: f64,
    pub coeff_hi: f64,
}

impl Default for TargetSpec {
    fn default() -> Self {
        Self { terms_min: 5, terms_max: 15, coeff_lo: -1.0, coeff_hi: 1.0 }
    }
}

impl TargetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.terms_min == 0 || self.terms_min > self.terms_max {
            return Err(invalid("target needs 1 ≤ terms_min ≤ terms_max"));
        }
        if !(self.coeff_lo.is_finite() && self.coeff_hi.is_finite() && self.coeff_lo <= self.coeff_hi) {
            return Err(invalid("target coefficient range must be finite and ordered"));
        }
        Ok(())
    }
}

/// Draws a target: the term count, then each center followed by its
/// coefficient, all from `stream`.
pub fn random_target<R: Rng + ?Sized>(
    kernel: Kernel,
    domain: &BoxDomain,
    spec: &TargetSpec,
    stream: &mut R,
) -> Result<Expansion> {
    spec.validate()?;
    if domain.dim() != kernel.dim() {
        return Err(Error::DimensionMismatch { expected: kernel.dim(), got: domain.dim() });
    }
    let d = domain.dim();
    let terms = stream.random_range(spec.terms_min..=spec.terms_max);
    let mut centers = Vec::with_capacity(terms * d);
    let mut coeffs = Vec::with_capacity(terms);
    for _ in 0..terms {
        for axis in 0..d {
            let u: f64 = stream.random();
            centers.push(domain.lo()[axis] + u * domain.width(axis));
        }
        let u: f64 = stream.random();
        coeffs.push(spec.coeff_lo + u * (spec.coeff_hi - spec.coeff_lo));
    }
    Expansion::new(kernel, PointSet::new(d, centers)?, coeffs)
}

/// `‖f̃ − f‖ / ‖f‖` in `L²(μ)`, `f̃` the minimal-norm interpolant of `f` on
/// `points`.
pub fn relative_error(f: &Expansion, points: &PointSet, measure: &Measure) -> Result<f64> {
    let truth = f.eval(measure.nodes())?;
    let sq: Vec<f64> = truth.iter().map(|v| v * v).collect();
    let norm = libm::sqrt(measure.integrate(&sq)?);
    if norm.is_nan() || norm <= DEGENERATE_NORM {
        return Err(Error::DegenerateTarget { norm });
    }
    let interp = min_norm_interpolant(f.kernel(), points, &f.eval(points)?)?;
    let approx = interp.eval(measure.nodes())?;
    let diff: Vec<f64> = truth.iter().zip(&approx).map(|(t, a)| (t - a) * (t - a)).collect();
    Ok(libm::sqrt(measure.integrate(&diff)?.max(0.0)) / norm)
}

/// Mean and sample standard deviation of `E_equ − E_opt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImprovementStats {
    pub mean: f64,
    /// Divisor `trials − 1`; zero for a single trial.
    pub std: f64,
    /// Trials with `E_opt > E_equ`.
    pub count_opt_worse: usize,
}

impl ImprovementStats {
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(invalid("no trials"));
        }
        let t = pairs.len() as f64;
        let mean = pairs.iter().map(|(o, e)| e - o).sum::<f64>() / t;
        let std = if pairs.len() > 1 {
            libm::sqrt(pairs.iter().map(|(o, e)| (e - o - mean) * (e - o - mean)).sum::<f64>() / (t - 1.0))
        } else {
            0.0
        };
        let count_opt_worse = pairs.iter().filter(|(o, e)| o > e).count();
        Ok(Self { mean, std, count_opt_worse })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// Midpoint-rule quadrature of Lebesgue measure on the domain.
    Grid { resolution: Vec<usize> },
    /// Uniform probability on the equally spaced configuration of `count`
    /// points.
    EquispacedNodes { count: usize },
    /// Explicit nodes; uniform weights `1/m` when `weights` is `None`.
    Discrete { nodes: PointSet, weights: Option<Vec<f64>> },
}

impl MeasureSpec {
    pub fn build(&self, domain: &BoxDomain) -> Result<Measure> {
        match self {
            MeasureSpec::Grid { resolution } => Measure::grid(domain, resolution),
            MeasureSpec::EquispacedNodes { count } => Measure::discrete_uniform(equally_spaced(domain, *count)?),
            MeasureSpec::Discrete { nodes, weights: None } => Measure::discrete_uniform(nodes.clone()),
            MeasureSpec::Discrete { nodes, weights: Some(w) } => Measure::new(nodes.clone(), w.clone()),
        }
    }

    /// Points per axis, used to size a refined error grid.
    fn per_axis(&self, dim: usize) -> Vec<usize> {
        match self {
            MeasureSpec::Grid { resolution } => resolution.clone(),
            MeasureSpec::EquispacedNodes { count } => alloc::vec![integer_root(*count, dim).unwrap_or(*count); dim],
            MeasureSpec::Discrete { nodes, .. } => {
                let k = libm::ceil(libm::pow(nodes.len() as f64, 1.0 / dim as f64)) as usize;
                alloc::vec![k.max(2); dim]
            }
        }
    }
}

/// Quadrature used for the relative errors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ErrorMeasure {
    /// The objective's own measure.
    #[default]
    SameAsObjective,
    /// Midpoint grid with `factor` times the objective's points per axis.
    Refined { factor: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kernel: Kernel,
    pub domain: BoxDomain,
    pub n: usize,
    pub objective: ObjectiveKind,
    pub measure: MeasureSpec,
    pub error_measure: ErrorMeasure,
    pub trials: usize,
    pub target: TargetSpec,
    pub seed: u64,
    pub search: SearchConfig,
}

impl ExperimentConfig {
    /// Defaults for everything but the problem itself.
    pub fn new(kernel: Kernel, domain: BoxDomain, n: usize, objective: ObjectiveKind, measure: MeasureSpec) -> Self {
        Self {
            kernel,
            domain,
            n,
            objective,
            measure,
            error_measure: ErrorMeasure::default(),
            trials: 100,
            target: TargetSpec::default(),
            seed: 0,
            search: SearchConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be positive"));
        }
        if let ErrorMeasure::Refined { factor: 0 } = self.error_measure {
            return Err(invalid("refinement factor must be positive"));
        }
        self.target.validate()?;
        self.search.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub e_opt: f64,
    pub e_equ: f64,
    /// Degenerate targets discarded before this one.
    pub redraws: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Ordered by trial index.
    pub trials: Vec<TrialOutcome>,
    pub mean_improvement: f64,
    pub std_improvement: f64,
    pub count_opt_worse: usize,
    pub points_opt: PointSet,
    pub points_equ: PointSet,
    pub search: SearchResult,
    /// Objective at the equally spaced points, minimize convention.
    pub objective_equ: f64,
}

impl ExperimentReport {
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.trials.iter().map(|t| (t.e_opt, t.e_equ)).collect()
    }
}

/// A validated experiment with its measures, objective and baseline built.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    config: ExperimentConfig,
    spec: ObjectiveSpec,
    error_measure: Measure,
    points_equ: PointSet,
}

impl ExperimentPlan {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let measure = config.measure.build(&config.domain)?;
        let error_measure = match config.error_measure {
            ErrorMeasure::SameAsObjective => measure.clone(),
            ErrorMeasure::Refined { factor } => {
                let res: Vec<usize> = config.measure.per_axis(config.domain.dim()).iter().map(|r| r * factor).collect();
                Measure::grid(&config.domain, &res)?
            }
        };
        let points_equ = equally_spaced(&config.domain, config.n)?;
        let spec = ObjectiveSpec::new(config.objective, config.kernel, measure, config.domain.clone(), config.n)?;
        Ok(Self { config, spec, error_measure, points_equ })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    pub fn error_measure(&self) -> &Measure {
        &self.error_measure
    }

    pub fn points_equ(&self) -> &PointSet {
        &self.points_equ
    }

    /// Draws the target of `trial` from its own stream and scores both
    /// configurations.
    pub fn run_trial(&self, points_opt: &PointSet, trial: usize) -> Result<TrialOutcome> {
        let mut stream = rng::trial_stream(self.config.seed, trial);
        for redraws in 0..=MAX_REDRAWS {
            let f = random_target(self.config.kernel, &self.config.domain, &self.config.target, &mut stream)?;
            match relative_error(&f, points_opt, &self.error_measure) {
                Ok(e_opt) => {
                    let e_equ = relative_error(&f, &self.points_equ, &self.error_measure)?;
                    return Ok(TrialOutcome { trial, e_opt, e_equ, redraws });
                }
                Err(Error::DegenerateTarget { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(invalid(format!("trial {trial}: every target drawn was degenerate")))
    }

    pub fn finish(&self, search: SearchResult, mut trials: Vec<TrialOutcome>) -> Result<ExperimentReport> {
        trials.sort_by_key(|t| t.trial);
        if trials.len() != self.config.trials || trials.iter().enumerate().any(|(i, t)| t.trial != i) {
            return Err(invalid("trial outcomes do not cover every trial exactly once"));
        }
        let pairs: Vec<(f64, f64)> = trials.iter().map(|t| (t.e_opt, t.e_equ)).collect();
        let stats = ImprovementStats::from_pairs(&pairs)?;
        let objective_equ = self.spec.evaluate(&self.points_equ.sorted())?.value;
        Ok(ExperimentReport {
            config: self.config.clone(),
            trials,
            mean_improvement: stats.mean,
            std_improvement: stats.std,
            count_opt_worse: stats.count_opt_worse,
            points_opt: search.points.clone(),
            points_equ: self.points_equ.clone(),
            search,
            objective_equ,
        })
    }
}

/// Optimizes, then runs every trial in order.
pub fn run_experiment(config: ExperimentConfig) -> Result<ExperimentReport> {
    let plan = ExperimentPlan::new(config)?;
    let search = optimize::optimize_points(plan.spec(), &plan.config().search)?;
    let trials = (0..plan.config().trials).map(|t| plan.run_trial(&search.points, t)).collect::<Result<Vec<_>>>()?;
    plan.finish(search, trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dom(lo: f64, hi: f64) -> BoxDomain {
        BoxDomain::interval(lo, hi).unwrap()
    }

    #[test]
    fn equally_spaced_examples() {
        assert_eq!(equally_spaced(&dom(-3.0, 3.0), 3).unwrap().coords(), [-3.0, 0.0, 3.0]);
        assert_eq!(equally_spaced(&dom(-3.0, 3.0), 1).unwrap().coords(), [0.0]);
        let sq = equally_spaced(&BoxDomain::cube(-2.0, 2.0, 2).unwrap(), 25).unwrap();
        assert_eq!(sq.len(), 25);
        assert_eq!(sq.point(0), [-2.0, -2.0]);
        assert_eq!(sq.point(1), [-2.0, -1.0]);
        assert_eq!(sq.point(24), [2.0, 2.0]);
        assert!(equally_spaced(&BoxDomain::cube(-2.0, 2.0, 2).unwrap(), 24).is_err());
        assert_eq!(equally_spaced(&BoxDomain::cube(0.0, 1.0, 3).unwrap(), 27).unwrap().len(), 27);
    }

    #[test]
    fn degenerate_target_spec() {
        let spec = TargetSpec { terms_min: 1, terms_max: 1, coeff_lo: 1.0, coeff_hi: 1.0 };
        let f = random_target(Kernel::gaussian(1), &dom(0.0, 1.0), &spec, &mut rng::trial_stream(3, 0)).unwrap();
        assert_eq!(f.coefficients(), [1.0]);
        assert!((0.0..=1.0).contains(&f.centers().point(0)[0]));
    }

    #[test]
    fn random_target_is_reproducible() {
        let spec = TargetSpec::default();
        let draw = || random_target(Kernel::sinc(1), &dom(-3.0, 3.0), &spec, &mut rng::trial_stream(9, 4)).unwrap();
        let (a, b) = (draw(), draw());
        assert_eq!(a, b);
        assert!((5..=15).contains(&a.coefficients().len()));
        assert!(a.norm() > 0.0);
    }

    #[test]
    fn relative_error_exact_cases() {
        let k = Kernel::gaussian(1);
        let mu = Measure::grid(&dom(-3.0, 3.0), &[40]).unwrap();
        let centers = PointSet::from_1d(&[-1.0, 0.5, 2.0]).unwrap();
        let f = Expansion::new(k, centers.clone(), alloc::vec![0.3, -1.0, 0.7]).unwrap();
        let superset = centers.with_point(&[-2.5]).unwrap();
        assert!(relative_error(&f, &superset, &mu).unwrap() < 1e-8);

        let small = Measure::discrete_uniform(PointSet::from_1d(&[-1.0, 0.0, 1.0]).unwrap()).unwrap();
        assert!(relative_error(&f, small.nodes(), &small).unwrap() < 1e-8);

        let s = Kernel::sinc(1);
        let g = Expansion::new(s, PointSet::from_1d(&[-2.0, 1.0]).unwrap(), alloc::vec![1.0, 0.5]).unwrap();
        let ints = PointSet::from_1d(&[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!(relative_error(&g, &ints, &mu).unwrap() < 1e-8);

        let zero = Expansion::new(k, centers.clone(), alloc::vec![0.0; 3]).unwrap();
        assert!(matches!(relative_error(&zero, &centers, &mu), Err(Error::DegenerateTarget { .. })));
    }

    #[test]
    fn stats_use_sample_deviation() {
        let s = ImprovementStats::from_pairs(&[(0.1, 0.3), (0.2, 0.2), (0.5, 0.2)]).unwrap();
        let d = [0.2, 0.0, -0.3];
        let mean = d.iter().sum::<f64>() / 3.0;
        let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 2.0;
        assert!((s.mean - mean).abs() < 1e-15 && (s.std - libm::sqrt(var)).abs() < 1e-15);
        assert_eq!(s.count_opt_worse, 1);
        assert_eq!(ImprovementStats::from_pairs(&[(0.1, 0.2)]).unwrap().std, 0.0);
    }

    fn small_config(trials: usize) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(
            Kernel::gaussian(1),
            dom(-3.0, 3.0),
            4,
            ObjectiveKind::Trace,
            MeasureSpec::Grid { resolution: alloc::vec![40] },
        );
        c.trials = trials;
        c.seed = 5;
        c.search.restarts = 3;
        c
    }

    #[test]
    fn experiment_is_reproducible() {
        let a = run_experiment(small_config(3)).unwrap();
        let b = run_experiment(small_config(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials.len(), 3);
        assert!(a.search.objective_value <= a.objective_equ);
        let stats = ImprovementStats::from_pairs(&a.pairs()).unwrap();
        assert_eq!(stats.mean.to_bits(), a.mean_improvement.to_bits());
        assert!(a.trials.iter().all(|t| t.e_opt >= 0.0 && t.e_equ >= 0.0));
    }

    #[test]
    fn covering_all_nodes_gives_zero_errors() {
        let mut c = small_config(2);
        c.n = 5;
        c.measure = MeasureSpec::EquispacedNodes { count: 5 };
        c.objective = ObjectiveKind::Supnorm;
        let r = run_experiment(c).unwrap();
        for t in &r.trials {
            assert!(t.e_opt < 1e-6 && t.e_equ < 1e-8, "{t:?}");
        }
    }

    #[test]
    fn plan_rejects_bad_configs() {
        let mut c = small_config(0);
        assert!(ExperimentPlan::new(c.clone()).is_err());
        c.trials = 1;
        c.target.terms_min = 20;
        assert!(ExperimentPlan::new(c).is_err());
        let mut c = small_config(1);
        c.error_measure = ErrorMeasure::Refined { factor: 4 };
        let plan = ExperimentPlan::new(c).unwrap();
        assert_eq!(plan.error_measure().len(), 160);
    }

    proptest! {
        #[test]
        fn one_dimensional_spacing(lo in -5.0..0.0f64, width in 0.1..5.0f64, n in 2usize..20) {
            let p = equally_spaced(&dom(lo, lo + width), n).unwrap();
            prop_assert_eq!(p.point(0)[0], lo);
            prop_assert_eq!(p.point(n - 1)[0], lo + width);
            let step = width / (n - 1) as f64;
            for i in 1..n {
                prop_assert!((p.point(i)[0] - p.point(i - 1)[0] - step).abs() < 1e-12);
            }
        }
    }
}
