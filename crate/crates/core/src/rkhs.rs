//! Primitives in `H_K`: kernel expansions, the power function `φ_X`,
//! minimal-norm interpolation and the distance between `S_X` and the
//! Karhunen–Loève subspace.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{self, Cholesky, JitterPolicy};
use crate::measure::{Measure, PointSet};
use crate::spectral::{k_omega, EigenBasis};
use crate::TRUNCATION;

/// `f = Σ_j c_j K(z_j, ·)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    kernel: Kernel,
    centers: PointSet,
    coefficients: Vec<f64>,
}

impl Expansion {
    pub fn new(kernel: Kernel, centers: PointSet, coefficients: Vec<f64>) -> Result<Self> {
        kernel.check_set(&centers)?;
        if centers.len() != coefficients.len() {
            return Err(Error::DimensionMismatch { expected: centers.len(), got: coefficients.len() });
        }
        Ok(Self { kernel, centers, coefficients })
    }

    /// The kernel section `K(z, ·)`.
    pub fn section(kernel: Kernel, z: &[f64]) -> Result<Self> {
        kernel.check_point(z)?;
        Self::new(kernel, PointSet::new(z.len(), z.to_vec())?, alloc::vec![1.0])
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn centers(&self) -> &PointSet {
        &self.centers
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval_at(&self, x: &[f64]) -> Result<f64> {
        self.kernel.check_point(x)?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.centers.iter().zip(&self.coefficients).map(|(z, c)| c * self.kernel.eval_unchecked(z, x)).sum()
    }

    /// Pointwise values at every query point.
    pub fn eval(&self, queries: &PointSet) -> Result<Vec<f64>> {
        self.kernel.check_set(queries)?;
        Ok(queries.iter().map(|x| self.eval_unchecked(x)).collect())
    }

    /// `(f, g)_{H_K} = cᵀ K[Z, W] d`.
    pub fn inner(&self, other: &Expansion) -> Result<f64> {
        rkhs_inner(self, other)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(rkhs_inner(self, self).map(|v| v.max(0.0)).unwrap_or(0.0))
    }
}

pub fn rkhs_inner(f: &Expansion, g: &Expansion) -> Result<f64> {
    if f.kernel != g.kernel {
        return Err(invalid("inner product of expansions over different kernels"));
    }
    if f.centers.is_empty() || g.centers.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (z, c) in f.centers.iter().zip(&f.coefficients) {
        for (w, d) in g.centers.iter().zip(&g.coefficients) {
            total += c * d * f.kernel.eval_unchecked(z, w);
        }
    }
    Ok(total)
}

pub fn rkhs_norm(f: &Expansion) -> f64 {
    f.norm()
}

/// Minimal-norm interpolant `Σ α_j K(x_j, ·)` with `K[X] α = f(X)`.
#[derive(Debug, Clone)]
pub struct Interpolant {
    expansion: Expansion,
    jitter: f64,
}

impl Interpolant {
    pub fn points(&self) -> &PointSet {
        self.expansion.centers()
    }

    pub fn coefficients(&self) -> &[f64] {
        self.expansion.coefficients()
    }

    /// Diagonal shift the solver needed (0 for a clean factorization).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn eval(&self, queries: &PointSet) -> Result<Vec<f64>> {
        self.expansion.eval(queries)
    }

    pub fn as_expansion(&self) -> &Expansion {
        &self.expansion
    }

    pub fn into_expansion(self) -> Expansion {
        self.expansion
    }
}

pub fn min_norm_interpolant(kernel: Kernel, points: &PointSet, values: &[f64]) -> Result<Interpolant> {
    if values.len() != points.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), got: values.len() });
    }
    let gram = kernel.gram_sym(points)?;
    let chol = Cholesky::new(&gram, JitterPolicy::default())?;
    let alpha = chol.solve_vec(values);
    Ok(Interpolant { expansion: Expansion::new(kernel, points.clone(), alpha)?, jitter: chol.jitter() })
}

/// Power function at many query points: `φ_X(x) = sqrt(K(x,x) − k_xᵀ K[X]⁻¹ k_x)`
/// with one factorization of `K[X]`.
pub fn power_function_batch(kernel: Kernel, points: &PointSet, queries: &PointSet) -> Result<Vec<f64>> {
    kernel.check_set(queries)?;
    if queries.is_empty() {
        return Ok(Vec::new());
    }
    let chol = Cholesky::new(&kernel.gram_sym(points)?, JitterPolicy::default())?;
    let cross = kernel.gram(points, queries)?;
    let z = chol.solve_lower(&cross);
    Ok(queries
        .iter()
        .enumerate()
        .map(|(q, x)| {
            let explained = z.column(q).norm_squared();
            libm::sqrt((kernel.diagonal(x) - explained).max(0.0))
        })
        .collect())
}

pub fn power_function(kernel: Kernel, points: &PointSet, x: &[f64]) -> Result<f64> {
    kernel.check_point(x)?;
    let q = PointSet::new(x.len(), x.to_vec())?;
    Ok(power_function_batch(kernel, points, &q)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiNorm {
    /// `sqrt(∫ φ² dμ)`
    L2,
    /// `max_nodes φ`
    Sup,
}

pub fn phi_norm(kernel: Kernel, points: &PointSet, measure: &Measure, p: PhiNorm) -> Result<f64> {
    let phi = power_function_batch(kernel, points, measure.nodes())?;
    Ok(match p {
        PhiNorm::L2 => {
            let sq: Vec<f64> = phi.iter().map(|v| v * v).collect();
            libm::sqrt(measure.integrate(&sq)?.max(0.0))
        }
        PhiNorm::Sup => phi.iter().copied().fold(0.0, f64::max),
    })
}

fn check_basis(kernel: Kernel, points: &PointSet, basis: &EigenBasis) -> Result<()> {
    if basis.kernel() != kernel {
        return Err(invalid("eigenbasis was built for a different kernel"));
    }
    if basis.len() != points.len() {
        return Err(invalid(format!("basis has {} eigenfunctions but X has {} points", basis.len(), points.len())));
    }
    kernel.check_set(points)
}

/// True when `E Eᵀ` has an eigenvalue below the truncation threshold, taken
/// relative to the larger of its own top eigenvalue and the largest diagonal
/// entry of `K[X]`. Since `Σ_k e_k(x)² ≤ K(x, x)`, the second scale catches a
/// uniformly tiny `E`.
pub(crate) fn is_singular_gram(eet: &DMatrix<f64>, kx: &DMatrix<f64>) -> Result<bool> {
    let eig = linalg::sym_eig(eet)?;
    let Some(&min) = eig.values.as_slice().last() else {
        return Ok(true);
    };
    let scale = kx.diagonal().iter().fold(eig.values[0], |m, v| m.max(*v));
    Ok(scale.is_nan() || scale <= 0.0 || min < TRUNCATION * scale)
}

/// `θ = λ_max(K[X] (E Eᵀ)⁻¹)`, `+∞` when `E` is singular.
pub(crate) fn subspace_theta(kernel: Kernel, points: &PointSet, basis: &EigenBasis) -> Result<f64> {
    check_basis(kernel, points, basis)?;
    let e = basis.eval(points)?;
    let eet = &e * e.transpose();
    let kx = kernel.gram_sym(points)?;
    if is_singular_gram(&eet, &kx)? {
        return Ok(f64::INFINITY);
    }
    linalg::max_gen_eig(&kx, &eet)
}

/// `‖P_{S_X} − P_{S_T}‖ = sqrt(1 − 1/θ)`; 1 when `E` is singular.
pub fn subspace_distance(kernel: Kernel, points: &PointSet, basis: &EigenBasis) -> Result<f64> {
    let theta = subspace_theta(kernel, points, basis)?;
    if !theta.is_finite() {
        return Ok(1.0);
    }
    Ok(libm::sqrt((1.0 - 1.0 / theta).max(0.0)))
}

/// Orthogonal projector, in the coordinates of `coords`' row space, onto the
/// span of its columns. Directions with Gram eigenvalue below the truncation
/// threshold are dropped.
fn column_projector(coords: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let g = linalg::symmetrize(&(coords.transpose() * coords));
    let eig = linalg::sym_eig(&g)?;
    let top = eig.values.get(0).copied().unwrap_or(0.0);
    let r = coords.nrows();
    let mut p = DMatrix::zeros(r, r);
    if top <= 0.0 {
        return Ok(p);
    }
    for (i, &mu) in eig.values.iter().enumerate() {
        if mu <= TRUNCATION * top {
            break;
        }
        let q = coords * eig.vectors.column(i) / libm::sqrt(mu);
        p += &q * q.transpose();
    }
    Ok(p)
}

/// The same distance computed from explicit projectors on the joint span of
/// `{K(x_j, ·)} ∪ {e_k}`. Independent of the generalized-eigenvalue route.
pub fn subspace_distance_direct(kernel: Kernel, points: &PointSet, basis: &EigenBasis) -> Result<f64> {
    check_basis(kernel, points, basis)?;
    let n = points.len();
    let e = basis.eval(points)?;
    let kx = kernel.gram_sym(points)?;
    let ee = basis.gram();

    // Gram of the 2n generators: [[K[X], E], [Eᵀ, (e_i, e_k)]].
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(&kx);
    h.view_mut((0, n), (n, n)).copy_from(&e);
    h.view_mut((n, 0), (n, n)).copy_from(&e.transpose());
    h.view_mut((n, n), (n, n)).copy_from(&ee);

    let eig = linalg::sym_eig(&linalg::symmetrize(&h))?;
    let top = eig.values[0];
    let rank = eig.values.iter().take_while(|&&mu| mu > TRUNCATION * top).count();
    // Generator a has coordinate sqrt(μ_i)·v_{a,i} on orthonormal direction i.
    let coords = DMatrix::from_fn(rank, 2 * n, |i, a| libm::sqrt(eig.values[i]) * eig.vectors[(a, i)]);

    let p_x = column_projector(&coords.columns(0, n).into_owned())?;
    let p_t = column_projector(&coords.columns(n, n).into_owned())?;
    let diff = linalg::symmetrize(&(p_x - p_t));
    let spec = linalg::sym_eig(&diff)?;
    Ok(spec.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// `2 K_Ω · dist(S_X, S_T)`, an upper bound on `E(S_X) − E(S_T)`.
pub fn energy_gap_bound(kernel: Kernel, measure: &Measure, points: &PointSet, basis: &EigenBasis) -> Result<f64> {
    Ok(2.0 * k_omega(kernel, measure)? * subspace_distance(kernel, points, basis)?)
}
