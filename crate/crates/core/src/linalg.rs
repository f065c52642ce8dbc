//! Dense symmetric linear algebra used throughout the crate.
//!
//! All routines symmetrize their input first; quadrature sums and floating
//! point noise leave matrices only approximately symmetric.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::TRUNCATION;

/// Eigenpairs of a symmetric matrix, values sorted descending, vectors as
/// orthonormal columns. The first non-negligible component of each vector is
/// positive so repeated runs produce identical signs.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

const SYMMETRY_TOL: f64 = 1e-10;

pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

fn check_square(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(invalid(format!("expected a square matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(invalid("matrix has non-finite entries"));
    }
    Ok(())
}

fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    check_square(a)?;
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let asym = (a - a.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(invalid(format!("matrix is not symmetric (max |A - Aᵀ| = {asym:e})")));
    }
    Ok(())
}

pub fn sym_eig(a: &DMatrix<f64>) -> Result<SymEig> {
    check_symmetric(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(SymEig { values: DVector::zeros(0), vectors: DMatrix::zeros(0, 0) });
    }
    let eig = symmetrize(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));

    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        if let Some(lead) = col.iter().copied().find(|v| v.abs() > 1e-14) {
            if lead < 0.0 {
                col.neg_mut();
            }
        }
        vectors.set_column(dst, &col);
    }
    Ok(SymEig { values, vectors })
}

/// Diagonal shift schedule for Cholesky retries, relative to `tr(A)/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterPolicy {
    pub start: f64,
    pub max: f64,
    pub factor: f64,
}

impl Default for JitterPolicy {
    fn default() -> Self {
        Self { start: 1e-12, max: 1e-6, factor: 10.0 }
    }
}

impl JitterPolicy {
    /// Factor without any shift; fail on the first non-positive pivot.
    pub fn none() -> Self {
        Self { start: 0.0, max: 0.0, factor: 10.0 }
    }
}

/// Lower Cholesky factor of `A + τI`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: DMatrix<f64>,
    jitter: f64,
}

fn factor_shifted(a: &DMatrix<f64>, shift: f64) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)] + shift;
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0 && d.is_finite()) {
            return None;
        }
        let djj = libm::sqrt(d);
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

impl Cholesky {
    /// Factors `A`, retrying with `A + τI` per `policy` when a pivot is not
    /// positive.
    pub fn new(a: &DMatrix<f64>, policy: JitterPolicy) -> Result<Self> {
        check_square(a)?;
        let a = symmetrize(a);
        let n = a.nrows();
        if let Some(lower) = factor_shifted(&a, 0.0) {
            return Ok(Self { lower, jitter: 0.0 });
        }
        let scale = a.trace() / n.max(1) as f64;
        if scale > 0.0 && policy.start > 0.0 {
            let ceiling = policy.max * scale * (1.0 + 1e-9);
            let mut tau = policy.start * scale;
            while tau <= ceiling {
                if let Some(lower) = factor_shifted(&a, tau) {
                    return Ok(Self { lower, jitter: tau });
                }
                tau *= policy.factor;
            }
        }
        Err(Error::Singular(format!("Cholesky failed for a {n}x{n} matrix even with maximal jitter")))
    }

    pub fn lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    /// The diagonal shift that made the factorization succeed (0 if none).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// `L⁻¹ B`.
    pub fn solve_lower(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = b.clone();
        let ok = self.lower.solve_lower_triangular_mut(&mut y);
        debug_assert!(ok);
        y
    }

    /// `(A + τI)⁻¹ B`.
    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = self.solve_lower(b);
        let ok = self.lower.tr_solve_lower_triangular_mut(&mut y);
        debug_assert!(ok);
        y
    }

    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let rhs = DMatrix::from_column_slice(b.len(), 1, b);
        self.solve(&rhs).iter().copied().collect()
    }
}

#[derive(Debug, Clone)]
pub struct CholSolve {
    pub solution: DMatrix<f64>,
    pub jitter: f64,
}

/// Solves `A X = B` for SPD `A` with the jitter fallback.
pub fn chol_solve(a: &DMatrix<f64>, b: &DMatrix<f64>, policy: JitterPolicy) -> Result<CholSolve> {
    if b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
    }
    let chol = Cholesky::new(a, policy)?;
    Ok(CholSolve { solution: chol.solve(b), jitter: chol.jitter() })
}

/// Symmetric `A^{-1/2}` from the eigendecomposition.
pub fn inv_sqrt(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = sym_eig(a)?;
    let n = a.nrows();
    let top = if n == 0 { 0.0 } else { eig.values[0] };
    if n == 0 || top <= 0.0 || eig.values[n - 1] <= TRUNCATION * top {
        return Err(Error::Singular(format!("inverse square root needs eigenvalues above {TRUNCATION:e}·λ_max")));
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| eig.vectors[(i, j)] / libm::sqrt(eig.values[j]));
    Ok(symmetrize(&(&scaled * eig.vectors.transpose())))
}

/// Largest `θ` with `A v = θ B v`, i.e. `λ_max(A B⁻¹)`, through whitening
/// with the Cholesky factor of `B`. Returns `+∞` when `B` cannot be factored
/// even with jitter.
pub fn max_gen_eig(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    check_symmetric(a)?;
    check_square(b)?;
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
    }
    let chol = match Cholesky::new(b, JitterPolicy::default()) {
        Ok(c) => c,
        Err(Error::Singular(_)) => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    let y = chol.solve_lower(&symmetrize(a));
    let whitened = chol.solve_lower(&y.transpose());
    let eig = sym_eig(&symmetrize(&whitened))?;
    Ok(eig.values[0])
}

/// Smallest over largest eigenvalue of a symmetric PSD matrix; 0 when the
/// largest is not positive.
pub fn relative_min_eigenvalue(a: &DMatrix<f64>) -> Result<f64> {
    let eig = sym_eig(a)?;
    let n = eig.values.len();
    if n == 0 || eig.values[0] <= 0.0 {
        return Ok(0.0);
    }
    Ok(eig.values[n - 1] / eig.values[0])
}
