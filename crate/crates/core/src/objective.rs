//! Objectives over point configurations, all expressed for minimization.

use core::fmt;
use core::str::FromStr;

use alloc::format;

use crate::error::{invalid, Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{Cholesky, JitterPolicy};
use crate::measure::{BoxDomain, Measure, PointSet};
use crate::rkhs::{self, PhiNorm};
use crate::spectral::{self, EigenBasis};

/// Base of the penalty `PENALTY · (1 + violation)` returned for infeasible
/// or numerically degenerate configurations.
pub const PENALTY: f64 = 1e6;

/// Default minimum point separation as a fraction of the domain diameter.
pub const DEFAULT_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    /// Maximize `tr(𝐊 K[X]⁻¹)`.
    Trace,
    /// Maximize the same trace written as `Σ_i λ_i d_iᵀ K[X]⁻¹ d_i`.
    TraceSpectral,
    /// Minimize `θ = λ_max(K[X] (E Eᵀ)⁻¹)`.
    Subspace,
    /// Minimize `max_μ φ_X`.
    Supnorm,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 4] =
        [ObjectiveKind::Trace, ObjectiveKind::TraceSpectral, ObjectiveKind::Subspace, ObjectiveKind::Supnorm];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::Trace => "trace",
            ObjectiveKind::TraceSpectral => "trace_spectral",
            ObjectiveKind::Subspace => "subspace",
            ObjectiveKind::Supnorm => "supnorm",
        }
    }

    /// True for the trace objectives, which the optimizer sees negated.
    pub fn maximizes(self) -> bool {
        matches!(self, ObjectiveKind::Trace | ObjectiveKind::TraceSpectral)
    }

    pub fn needs_basis(self) -> bool {
        matches!(self, ObjectiveKind::TraceSpectral | ObjectiveKind::Subspace)
    }

    /// Converts a natural-sign value to the minimized one, and back.
    pub fn to_minimized(self, natural: f64) -> f64 {
        if self.maximizes() {
            -natural
        } else {
            natural
        }
    }

    pub fn to_natural(self, minimized: f64) -> f64 {
        self.to_minimized(minimized)
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ObjectiveKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid(format!("unknown objective `{s}`")))
    }
}

/// `tr(𝐊 K[X]⁻¹)`; lies in `[0, K_Ω]`.
pub fn trace_objective(kernel: Kernel, measure: &Measure, points: &PointSet) -> Result<f64> {
    let bk = spectral::bk_matrix(kernel, measure, points)?;
    let chol = Cholesky::new(&kernel.gram_sym(points)?, JitterPolicy::default())?;
    Ok(chol.solve(&bk).trace())
}

/// `tr(Λ Dᵀ K[X]⁻¹ D Λ)` with `D_ki = e_i(x_k)`, `Λ = diag(√λ_i)`. Matches
/// [`trace_objective`] when `basis` holds the full spectrum.
pub fn trace_objective_spectral(basis: &EigenBasis, kernel: Kernel, points: &PointSet) -> Result<f64> {
    if basis.kernel() != kernel {
        return Err(invalid("eigenbasis was built for a different kernel"));
    }
    let d = basis.eval(points)?;
    let chol = Cholesky::new(&kernel.gram_sym(points)?, JitterPolicy::default())?;
    let z = chol.solve_lower(&d);
    Ok(z.column_iter().zip(basis.eigenvalues()).map(|(c, l)| l * c.norm_squared()).sum())
}

/// `θ = λ_max(K[X] (E Eᵀ)⁻¹) ≥ 1`, or `+∞` when `E Eᵀ` is singular.
pub fn subspace_objective(basis: &EigenBasis, kernel: Kernel, points: &PointSet) -> Result<f64> {
    rkhs::subspace_theta(kernel, points, basis)
}

/// `max_μ φ_X`.
pub fn supnorm_objective(kernel: Kernel, measure: &Measure, points: &PointSet) -> Result<f64> {
    rkhs::phi_norm(kernel, points, measure, PhiNorm::Sup)
}

/// One objective evaluation in the minimize convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Set when `value` is a penalty rather than an objective value.
    pub penalized: bool,
}

impl Evaluation {
    pub fn penalty(violation: f64) -> Self {
        Self { value: PENALTY * (1.0 + violation), penalized: true }
    }

    /// Total order used everywhere a best evaluation is selected: feasible
    /// before penalized, then by value.
    pub fn cmp_key(&self, other: &Evaluation) -> core::cmp::Ordering {
        self.penalized.cmp(&other.penalized).then(self.value.total_cmp(&other.value))
    }
}

/// Everything needed to score a configuration of `n` points.
#[derive(Debug, Clone)]
pub struct ObjectiveSpec {
    kind: ObjectiveKind,
    kernel: Kernel,
    measure: Measure,
    basis: Option<EigenBasis>,
    n: usize,
    domain: BoxDomain,
    separation: f64,
}

impl ObjectiveSpec {
    /// Builds the spec, computing the eigenbasis when `kind` needs one: the
    /// full spectrum for [`ObjectiveKind::TraceSpectral`], the top `n`
    /// eigenfunctions for [`ObjectiveKind::Subspace`].
    pub fn new(kind: ObjectiveKind, kernel: Kernel, measure: Measure, domain: BoxDomain, n: usize) -> Result<Self> {
        let basis = match kind {
            ObjectiveKind::TraceSpectral => Some(spectral::kl_eigenbasis_full(kernel, &measure)?),
            ObjectiveKind::Subspace => Some(spectral::kl_eigenbasis(kernel, &measure, n)?),
            _ => None,
        };
        Self::with_basis(kind, kernel, measure, domain, n, basis)
    }

    /// Like [`ObjectiveSpec::new`] with a caller-supplied basis.
    pub fn with_basis(
        kind: ObjectiveKind,
        kernel: Kernel,
        measure: Measure,
        domain: BoxDomain,
        n: usize,
        basis: Option<EigenBasis>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(invalid("point count must be positive"));
        }
        kernel.check_set(measure.nodes())?;
        if domain.dim() != kernel.dim() {
            return Err(Error::DimensionMismatch { expected: kernel.dim(), got: domain.dim() });
        }
        match (&basis, kind.needs_basis()) {
            (None, true) => return Err(invalid(format!("objective `{kind}` needs an eigenbasis"))),
            (Some(_), false) => return Err(invalid(format!("objective `{kind}` takes no eigenbasis"))),
            (Some(b), true) => {
                if b.kernel() != kernel {
                    return Err(invalid("eigenbasis was built for a different kernel"));
                }
                if kind == ObjectiveKind::Subspace && b.len() != n {
                    return Err(invalid(format!("subspace objective needs {n} eigenfunctions, basis has {}", b.len())));
                }
            }
            (None, false) => {}
        }
        let separation = DEFAULT_SEPARATION * domain.diameter();
        Ok(Self { kind, kernel, measure, basis, n, domain, separation })
    }

    /// Overrides the minimum pairwise separation `δ_sep`.
    pub fn with_separation(mut self, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(invalid("separation must be finite and nonnegative"));
        }
        self.separation = delta;
        Ok(self)
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn basis(&self) -> Option<&EigenBasis> {
        self.basis.as_ref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    fn check_shape(&self, points: &PointSet) -> Result<()> {
        self.kernel.check_set(points)?;
        if points.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: points.len() });
        }
        Ok(())
    }

    /// The objective in its natural sign, with no feasibility checks.
    pub fn raw_value(&self, points: &PointSet) -> Result<f64> {
        self.check_shape(points)?;
        let basis = || self.basis.as_ref().expect("basis presence checked at construction");
        match self.kind {
            ObjectiveKind::Trace => trace_objective(self.kernel, &self.measure, points),
            ObjectiveKind::TraceSpectral => trace_objective_spectral(basis(), self.kernel, points),
            ObjectiveKind::Subspace => subspace_objective(basis(), self.kernel, points),
            ObjectiveKind::Supnorm => supnorm_objective(self.kernel, &self.measure, points),
        }
    }

    /// Minimize-convention value. Separation or domain violations, numerical
    /// failures and non-finite values yield a penalty instead of an error;
    /// only a wrong point count or dimension is an error.
    pub fn evaluate(&self, points: &PointSet) -> Result<Evaluation> {
        self.check_shape(points)?;
        let violation = points.separation_violation(self.separation) + self.domain.excess(points);
        if violation > 0.0 {
            return Ok(Evaluation::penalty(violation));
        }
        Ok(match self.raw_value(points) {
            Ok(v) if v.is_finite() => Evaluation { value: self.kind.to_minimized(v), penalized: false },
            _ => Evaluation::penalty(0.0),
        })
    }

    /// [`ObjectiveSpec::evaluate`] on a flattened coordinate vector.
    pub fn evaluate_flat(&self, coords: &[f64]) -> Result<Evaluation> {
        self.evaluate(&PointSet::new(self.dim(), coords.to_vec())?)
    }
}
