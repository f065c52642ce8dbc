//! Nyström discretization of the Karhunen–Loève operator
//! `(Tf)(x) = ∫ f(t) K(t, x) dμ(t)` on a weighted node set.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{self, Cholesky, JitterPolicy};
use crate::measure::{Measure, PointSet};
use crate::rkhs::Expansion;
use crate::TRUNCATION;

/// Tolerance on `C K[Y] Cᵀ = I` accepted by [`EigenBasis::from_parts`].
pub const ORTHONORMALITY_TOL: f64 = 1e-8;

/// Relative eigenvalue gap below which the cut between kept and dropped
/// eigenfunctions is reported as a tie.
pub const TIE_GAP: f64 = 1e-10;

/// Top eigenfunctions `e_i = Σ_k C[i,k] K(y_k, ·)` of the discretized operator.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    kernel: Kernel,
    measure: Measure,
    eigenvalues: Vec<f64>,
    coeffs: DMatrix<f64>,
    boundary_tie: bool,
}

impl EigenBasis {
    /// Builds a basis from explicit coefficients, checking positivity,
    /// ordering and `H_K`-orthonormality.
    pub fn from_parts(kernel: Kernel, measure: Measure, eigenvalues: Vec<f64>, coeffs: DMatrix<f64>) -> Result<Self> {
        kernel.check_set(measure.nodes())?;
        let n = eigenvalues.len();
        if n == 0 {
            return Err(invalid("eigenbasis needs at least one eigenfunction"));
        }
        if coeffs.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, got: coeffs.nrows() });
        }
        if coeffs.ncols() != measure.len() {
            return Err(Error::DimensionMismatch { expected: measure.len(), got: coeffs.ncols() });
        }
        if eigenvalues.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(invalid("eigenvalues must be positive and finite"));
        }
        if eigenvalues.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid("eigenvalues must be sorted in descending order"));
        }
        let gram = &coeffs * kernel.gram_sym(measure.nodes())? * coeffs.transpose();
        let defect = (gram - DMatrix::<f64>::identity(n, n)).abs().max();
        if defect.is_nan() || defect > ORTHONORMALITY_TOL {
            return Err(invalid(format!("basis is not H_K-orthonormal (defect {defect:.3e})")));
        }
        Ok(Self { kernel, measure, eigenvalues, coeffs, boundary_tie: false })
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `n × m` coefficient matrix `C`.
    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Set when `λ_n` and `λ_{n+1}` are within [`TIE_GAP`] relative to `λ_1`,
    /// so the kept subspace is not uniquely determined.
    pub fn boundary_tie(&self) -> bool {
        self.boundary_tie
    }

    pub fn eigenfunction(&self, i: usize) -> Result<Expansion> {
        if i >= self.len() {
            return Err(invalid(format!("eigenfunction index {i} out of range for basis of size {}", self.len())));
        }
        Expansion::new(self.kernel, self.measure.nodes().clone(), self.coeffs.row(i).iter().copied().collect())
    }

    /// `|queries| × n` matrix with entry `(j, k) = e_k(q_j)`.
    pub fn eval(&self, queries: &PointSet) -> Result<DMatrix<f64>> {
        self.kernel.check_set(queries)?;
        if queries.is_empty() {
            return Ok(DMatrix::zeros(0, self.len()));
        }
        let cross = self.kernel.gram(queries, self.measure.nodes())?;
        Ok(cross * self.coeffs.transpose())
    }

    /// `(e_i, e_k)_{H_K}`, the identity up to rounding.
    pub fn gram(&self) -> DMatrix<f64> {
        let k = self.kernel.gram_sym(self.measure.nodes()).expect("nodes were validated at construction");
        linalg::symmetrize(&(&self.coeffs * k * self.coeffs.transpose()))
    }
}

/// `M = W^{1/2} K[Y] W^{1/2}` and its eigen-decomposition.
fn nystrom(kernel: Kernel, measure: &Measure) -> Result<(DVector<f64>, linalg::SymEig)> {
    let sqrt_w = DVector::from_iterator(measure.len(), measure.weights().iter().map(|w| libm::sqrt(*w)));
    let mut m = kernel.gram_sym(measure.nodes())?;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            m[(i, j)] *= sqrt_w[i] * sqrt_w[j];
        }
    }
    let eig = linalg::sym_eig(&m)?;
    Ok((sqrt_w, eig))
}

/// Full discrete spectrum of `T` on `measure`, descending.
pub fn spectrum(kernel: Kernel, measure: &Measure) -> Result<Vec<f64>> {
    Ok(nystrom(kernel, measure)?.1.values.iter().copied().collect())
}

fn assemble(kernel: Kernel, measure: &Measure, sqrt_w: &DVector<f64>, eig: &linalg::SymEig, n: usize) -> EigenBasis {
    let m = measure.len();
    let coeffs = DMatrix::from_fn(n, m, |i, k| sqrt_w[k] * eig.vectors[(k, i)] / libm::sqrt(eig.values[i]));
    let top = eig.values[0];
    let boundary_tie = n < m && (eig.values[n - 1] - eig.values[n]) < TIE_GAP * top;
    EigenBasis {
        kernel,
        measure: measure.clone(),
        eigenvalues: eig.values.iter().take(n).copied().collect(),
        coeffs,
        boundary_tie,
    }
}

/// The `n` leading eigenfunctions of `T`.
pub fn kl_eigenbasis(kernel: Kernel, measure: &Measure, n: usize) -> Result<EigenBasis> {
    if n == 0 {
        return Err(invalid("eigenbasis size must be positive"));
    }
    if n > measure.len() {
        return Err(invalid(format!("requested {n} eigenfunctions from a measure with {} nodes", measure.len())));
    }
    let (sqrt_w, eig) = nystrom(kernel, measure)?;
    let top = eig.values[0];
    let kept = eig.values.iter().take_while(|&&l| top > 0.0 && l > TRUNCATION * top).count();
    if kept < n {
        return Err(Error::RankDeficient(format!("only {kept} eigenvalues exceed {TRUNCATION:e}·λ_1, {n} requested")));
    }
    Ok(assemble(kernel, measure, &sqrt_w, &eig, n))
}

/// Every eigenfunction whose eigenvalue exceeds the truncation threshold.
pub fn kl_eigenbasis_full(kernel: Kernel, measure: &Measure) -> Result<EigenBasis> {
    let (sqrt_w, eig) = nystrom(kernel, measure)?;
    let top = eig.values[0];
    let kept = eig.values.iter().take_while(|&&l| top > 0.0 && l > TRUNCATION * top).count();
    if kept == 0 {
        return Err(Error::RankDeficient("operator has no positive eigenvalue".into()));
    }
    let mut basis = assemble(kernel, measure, &sqrt_w, &eig, kept);
    basis.boundary_tie = false;
    Ok(basis)
}

/// `𝐊[k,l] = ∫ K(x_k, t) K(t, x_l) dμ(t)` by quadrature on the nodes.
pub fn bk_matrix(kernel: Kernel, measure: &Measure, points: &PointSet) -> Result<DMatrix<f64>> {
    let mut cross = kernel.gram(points, measure.nodes())?;
    let weighted = {
        let mut c = cross.clone();
        for (k, w) in measure.weights().iter().enumerate() {
            c.column_mut(k).scale_mut(*w);
        }
        c
    };
    cross = weighted * cross.transpose();
    Ok(linalg::symmetrize(&cross))
}

/// `K_Ω = ∫ K(t, t) dμ(t)`.
pub fn k_omega(kernel: Kernel, measure: &Measure) -> Result<f64> {
    kernel.check_set(measure.nodes())?;
    let diag: Vec<f64> = measure.nodes().iter().map(|t| kernel.diagonal(t)).collect();
    measure.integrate(&diag)
}

/// `E(V) = K_Ω − Σ_j ∫ u_j² dμ` for an `H_K`-orthonormal basis `u` of `span`.
pub fn subspace_energy(kernel: Kernel, measure: &Measure, span: &[Expansion]) -> Result<f64> {
    let total = k_omega(kernel, measure)?;
    if span.is_empty() {
        return Ok(total);
    }
    let n = span.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = span[i].inner(&span[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    if linalg::relative_min_eigenvalue(&g)? < TRUNCATION {
        return Err(Error::RankDeficient("span functions are linearly dependent".into()));
    }
    // Σ_j ∫ u_j² dμ = tr(G⁻¹ F W Fᵀ), F[i,k] = f_i(y_k).
    let mut f = DMatrix::zeros(n, measure.len());
    for (i, fi) in span.iter().enumerate() {
        for (k, v) in fi.eval(measure.nodes())?.into_iter().enumerate() {
            f[(i, k)] = v;
        }
    }
    let chol = Cholesky::new(&g, JitterPolicy::default())?;
    let z = chol.solve_lower(&f);
    let captured: f64 = z.column_iter().zip(measure.weights()).map(|(col, w)| w * col.norm_squared()).sum();
    Ok(total - captured)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::BoxDomain;
    use proptest::prelude::*;

    const E1: f64 = 0.367_879_441_171_442_3;

    fn pts(v: &[f64]) -> PointSet {
        PointSet::from_1d(v).unwrap()
    }

    fn uniform(v: &[f64]) -> Measure {
        Measure::discrete_uniform(pts(v)).unwrap()
    }

    fn check_invariants(b: &EigenBasis) {
        let k = b.kernel().gram_sym(b.measure().nodes()).unwrap();
        let c = b.coeffs();
        let n = b.len();
        assert!((c * &k * c.transpose() - DMatrix::<f64>::identity(n, n)).abs().max() < 1e-8);
        // T e_i = λ_i e_i at the nodes: K W K Cᵀ = K Cᵀ Λ
        let w = DMatrix::from_diagonal(&DVector::from_column_slice(b.measure().weights()));
        let lam = DMatrix::from_diagonal(&DVector::from_column_slice(b.eigenvalues()));
        let lhs = &k * w * &k * c.transpose();
        let rhs = &k * c.transpose() * lam;
        assert!((lhs - rhs).abs().max() < 1e-8 * b.eigenvalues()[0]);
    }

    #[test]
    fn two_node_gaussian_spectrum() {
        let b = kl_eigenbasis(Kernel::gaussian(1), &uniform(&[0.0, 1.0]), 2).unwrap();
        assert!((b.eigenvalues()[0] - 0.683_939_720_585_721_2).abs() < 1e-14);
        assert!((b.eigenvalues()[1] - 0.316_060_279_414_278_83).abs() < 1e-14);
        assert!((b.eigenvalues()[0] - (1.0 + E1) / 2.0).abs() < 1e-14);
        check_invariants(&b);
    }

    #[test]
    fn single_node_basis() {
        let mu = Measure::new(pts(&[0.4]), alloc::vec![1.0]).unwrap();
        let b = kl_eigenbasis(Kernel::exponential(1), &mu, 1).unwrap();
        assert!((b.eigenvalues()[0] - 1.0).abs() < 1e-15);
        let e = b.eval(&pts(&[0.4, 1.4])).unwrap();
        assert!((e[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((e[(1, 0)] - E1).abs() < 1e-15);

        let heavy = Measure::new(pts(&[0.4]), alloc::vec![2.5]).unwrap();
        let b = kl_eigenbasis(Kernel::exponential(1), &heavy, 1).unwrap();
        assert!((b.eigenvalues()[0] - 2.5).abs() < 1e-14);
    }

    #[test]
    fn eval_at_nodes_reproduces_eigen_relation() {
        let mu = uniform(&[-1.0, -0.2, 0.5, 1.3]);
        let b = kl_eigenbasis(Kernel::gaussian(1), &mu, 4).unwrap();
        check_invariants(&b);
        // E at the nodes equals K[Y] Cᵀ
        let e = b.eval(mu.nodes()).unwrap();
        let k = Kernel::gaussian(1).gram_sym(mu.nodes()).unwrap();
        assert!((e - k * b.coeffs().transpose()).abs().max() < 1e-14);
    }

    #[test]
    fn from_parts_rejects_degenerate_coefficients() {
        let mu = uniform(&[0.0, 1.0]);
        let zero = DMatrix::zeros(1, 2);
        assert!(EigenBasis::from_parts(Kernel::gaussian(1), mu.clone(), alloc::vec![0.5], zero).is_err());
        let b = kl_eigenbasis(Kernel::gaussian(1), &mu, 2).unwrap();
        let rebuilt = EigenBasis::from_parts(b.kernel(), mu, b.eigenvalues().to_vec(), b.coeffs().clone()).unwrap();
        assert_eq!(rebuilt.coeffs(), b.coeffs());
    }

    #[test]
    fn rank_deficiency_and_size_errors() {
        let mu = uniform(&[0.0, 1.0]);
        assert!(matches!(kl_eigenbasis(Kernel::gaussian(1), &mu, 3), Err(Error::InvalidArgument(_))));
        // sinc on nodes 0 and 1e-9 is numerically rank one
        let near = uniform(&[0.0, 1e-9]);
        assert!(matches!(kl_eigenbasis(Kernel::sinc(1), &near, 2), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn boundary_tie_is_flagged() {
        // sinc on integers: K[Y] = I, all eigenvalues equal 1/m
        let b = kl_eigenbasis(Kernel::sinc(1), &uniform(&[0.0, 1.0, 2.0]), 1).unwrap();
        assert!(b.boundary_tie());
        let b = kl_eigenbasis(Kernel::gaussian(1), &uniform(&[0.0, 1.0, 2.0]), 1).unwrap();
        assert!(!b.boundary_tie());
    }

    #[test]
    fn bk_matrix_examples() {
        let k = Kernel::gaussian(1);
        let v = bk_matrix(k, &uniform(&[0.0, 1.0]), &pts(&[0.0])).unwrap();
        assert!((v[(0, 0)] - 0.567_667_641_618_306_4).abs() < 1e-15);

        let x = pts(&[-0.3, 0.9]);
        let one = bk_matrix(k, &uniform(&[0.2]), &x).unwrap();
        let kx: Vec<f64> = x.iter().map(|p| k.eval(p, &[0.2]).unwrap()).collect();
        for i in 0..2 {
            for j in 0..2 {
                assert!((one[(i, j)] - kx[i] * kx[j]).abs() < 1e-15);
            }
        }

        let y = pts(&[-1.0, 0.0, 0.5, 2.0]);
        let ky = k.gram_sym(&y).unwrap();
        let full = bk_matrix(k, &Measure::discrete_uniform(y.clone()).unwrap(), &y).unwrap();
        assert!((full - &ky * &ky / 4.0).abs().max() < 1e-14);
    }

    #[test]
    fn k_omega_examples() {
        for k in [Kernel::gaussian(1), Kernel::sinc(1), Kernel::exponential(1)] {
            assert!((k_omega(k, &uniform(&[0.0, 0.3, 2.0])).unwrap() - 1.0).abs() < 1e-15);
        }
        let grid = Measure::grid(&BoxDomain::interval(-3.0, 3.0).unwrap(), &[201]).unwrap();
        assert!((k_omega(Kernel::gaussian(1), &grid).unwrap() - 6.0).abs() < 1e-12);
        let sq = Measure::grid(&BoxDomain::cube(0.0, 1.0, 2).unwrap(), &[4, 4]).unwrap();
        assert!((k_omega(Kernel::gaussian(2), &sq).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn energy_of_eigenbasis_span() {
        let k = Kernel::gaussian(1);
        let mu = Measure::grid(&BoxDomain::interval(-2.0, 2.0).unwrap(), &[25]).unwrap();
        let b = kl_eigenbasis(k, &mu, 3).unwrap();
        let span: Vec<Expansion> = (0..3).map(|i| b.eigenfunction(i).unwrap()).collect();
        let expect = k_omega(k, &mu).unwrap() - b.eigenvalues().iter().sum::<f64>();
        assert!((subspace_energy(k, &mu, &span).unwrap() - expect).abs() < 1e-10);
    }

    #[test]
    fn energy_of_node_sections_and_empty_span() {
        let k = Kernel::gaussian(1);
        let mu = uniform(&[-1.0, 0.0, 1.5]);
        let span: Vec<Expansion> = mu.nodes().iter().map(|y| Expansion::section(k, y).unwrap()).collect();
        assert!(subspace_energy(k, &mu, &span).unwrap().abs() < 1e-12);
        assert_eq!(subspace_energy(k, &mu, &[]).unwrap(), 1.0);
        let dup = [span[0].clone(), span[0].clone()];
        assert!(matches!(subspace_energy(k, &mu, &dup), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn spectral_sum_equals_k_omega() {
        let k = Kernel::gaussian(1);
        let mu = Measure::grid(&BoxDomain::interval(-3.0, 3.0).unwrap(), &[201]).unwrap();
        let total: f64 = spectrum(k, &mu).unwrap().iter().sum();
        assert!((total - k_omega(k, &mu).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn nystrom_refinement_is_stable() {
        let k = Kernel::gaussian(1);
        let dom = BoxDomain::interval(-3.0, 3.0).unwrap();
        let coarse = kl_eigenbasis(k, &Measure::grid(&dom, &[201]).unwrap(), 4).unwrap();
        let fine = kl_eigenbasis(k, &Measure::grid(&dom, &[401]).unwrap(), 4).unwrap();
        for (a, b) in coarse.eigenvalues().iter().zip(fine.eigenvalues()) {
            assert!(((a - b) / b).abs() < 1e-3);
        }
    }

    fn random_measure() -> impl Strategy<Value = Measure> {
        prop::collection::vec((-3.0..3.0f64, 0.1..2.0f64), 2..9).prop_filter_map("distinct", |raw| {
            let mut raw = raw;
            raw.sort_by(|a, b| a.0.total_cmp(&b.0));
            raw.dedup_by(|a, b| (a.0 - b.0).abs() < 0.2);
            let nodes: Vec<f64> = raw.iter().map(|r| r.0).collect();
            let weights: Vec<f64> = raw.iter().map(|r| r.1).collect();
            Measure::new(PointSet::from_1d(&nodes).ok()?, weights).ok()
        })
    }

    proptest! {
        #[test]
        fn random_measures_give_orthonormal_eigenbases(mu in random_measure()) {
            let b = kl_eigenbasis_full(Kernel::gaussian(1), &mu).unwrap();
            check_invariants(&b);
        }

        #[test]
        fn kl_subspace_is_optimal(mu in random_measure(), raw in prop::collection::vec(-3.0..3.0f64, 2)) {
            let k = Kernel::gaussian(1);
            prop_assume!((raw[0] - raw[1]).abs() > 0.1 && mu.len() >= 2);
            let b = kl_eigenbasis(k, &mu, 2).unwrap();
            let best: Vec<Expansion> = (0..2).map(|i| b.eigenfunction(i).unwrap()).collect();
            let other: Vec<Expansion> = raw.iter().map(|x| Expansion::section(k, &[*x]).unwrap()).collect();
            let e_best = subspace_energy(k, &mu, &best).unwrap();
            prop_assert!(subspace_energy(k, &mu, &other).unwrap() >= e_best - 1e-9);
        }

        #[test]
        fn energy_of_sample_span_matches_trace(mu in random_measure(), raw in prop::collection::vec(-3.0..3.0f64, 1..4)) {
            let k = Kernel::gaussian(1);
            let mut v = raw;
            v.sort_by(f64::total_cmp);
            v.dedup_by(|a, b| (*a - *b).abs() < 0.3);
            let x = pts(&v);
            let span: Vec<Expansion> = x.iter().map(|p| Expansion::section(k, p).unwrap()).collect();
            let bk = bk_matrix(k, &mu, &x).unwrap();
            let chol = Cholesky::new(&k.gram_sym(&x).unwrap(), JitterPolicy::default()).unwrap();
            let tr = chol.solve(&bk).trace();
            let expect = k_omega(k, &mu).unwrap() - tr;
            prop_assert!((subspace_energy(k, &mu, &span).unwrap() - expect).abs() < 1e-9);
        }
    }
}
