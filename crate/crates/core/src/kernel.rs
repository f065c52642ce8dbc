//! The three positive-definite kernel families and their Gram matrices.

use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::measure::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    /// `exp(-‖x − y‖²)`
    Gaussian,
    /// `Π_j sin(π(x_j − y_j)) / (π(x_j − y_j))`, the Paley–Wiener kernel.
    Sinc,
    /// `exp(-‖x − y‖)`
    Exponential,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Sinc => "sinc",
            KernelFamily::Exponential => "exponential",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(KernelFamily::Gaussian),
            "sinc" => Ok(KernelFamily::Sinc),
            "exponential" => Ok(KernelFamily::Exponential),
            other => Err(invalid(alloc::format!("unknown kernel family `{other}`"))),
        }
    }
}

/// A kernel family on `R^dim`. All three families have unit diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Kernel {
    family: KernelFamily,
    dim: usize,
}

/// Below this `|πt|` the sinc factor switches to its Taylor series.
const SINC_SERIES_CUTOFF: f64 = 1e-6;

fn sinc(t: f64) -> f64 {
    let u = PI * t;
    if u.abs() < SINC_SERIES_CUTOFF {
        1.0 - u * u / 6.0
    } else {
        libm::sin(u) / u
    }
}

impl Kernel {
    pub fn new(family: KernelFamily, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("kernel dimension must be positive"));
        }
        Ok(Self { family, dim })
    }

    /// # Panics
    /// If `dim == 0`.
    pub fn gaussian(dim: usize) -> Self {
        Self::new(KernelFamily::Gaussian, dim).expect("positive dimension")
    }

    /// # Panics
    /// If `dim == 0`.
    pub fn sinc(dim: usize) -> Self {
        Self::new(KernelFamily::Sinc, dim).expect("positive dimension")
    }

    /// # Panics
    /// If `dim == 0`.
    pub fn exponential(dim: usize) -> Self {
        Self::new(KernelFamily::Exponential, dim).expect("positive dimension")
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.eval_unchecked(x, y))
    }

    /// `K(x, y)` without dimension checks; slices must have length `dim`.
    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.family {
            KernelFamily::Gaussian => {
                let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                libm::exp(-r2)
            }
            KernelFamily::Exponential => {
                let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                libm::exp(-libm::sqrt(r2))
            }
            KernelFamily::Sinc => x.iter().zip(y).map(|(a, b)| sinc(a - b)).product(),
        }
    }

    /// `K(x, x)`; identically one for every supported family.
    #[inline]
    pub fn diagonal(&self, _x: &[f64]) -> f64 {
        1.0
    }

    /// `[K(a_j, b_k)]`, an `|a| × |b|` matrix.
    pub fn gram(&self, a: &PointSet, b: &PointSet) -> Result<DMatrix<f64>> {
        if a.is_empty() || b.is_empty() {
            return Err(invalid("gram matrix of an empty point list"));
        }
        self.check_set(a)?;
        self.check_set(b)?;
        Ok(DMatrix::from_fn(a.len(), b.len(), |j, k| self.eval_unchecked(a.point(j), b.point(k))))
    }

    /// Square Gram matrix `K[X]`, filled symmetrically.
    pub fn gram_sym(&self, x: &PointSet) -> Result<DMatrix<f64>> {
        if x.is_empty() {
            return Err(invalid("gram matrix of an empty point list"));
        }
        self.check_set(x)?;
        let n = x.len();
        let mut g = DMatrix::zeros(n, n);
        for j in 0..n {
            g[(j, j)] = self.eval_unchecked(x.point(j), x.point(j));
            for k in j + 1..n {
                let v = self.eval_unchecked(x.point(j), x.point(k));
                g[(j, k)] = v;
                g[(k, j)] = v;
            }
        }
        Ok(g)
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    pub(crate) fn check_set(&self, set: &PointSet) -> Result<()> {
        if set.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: set.dim() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E1: f64 = 0.367_879_441_171_442_3;
    const E2: f64 = 0.135_335_283_236_612_7;

    #[test]
    fn eval_examples() {
        assert!((Kernel::gaussian(1).eval(&[0.0], &[1.0]).unwrap() - E1).abs() < 1e-15);
        assert_eq!(Kernel::sinc(1).eval(&[2.0], &[2.0]).unwrap(), 1.0);
        assert!((Kernel::exponential(1).eval(&[0.0], &[2.0]).unwrap() - E2).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_wrong_dimension() {
        let err = Kernel::gaussian(2).eval(&[0.0], &[1.0, 2.0]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn gram_examples() {
        let x = PointSet::from_1d(&[0.0, 1.0]).unwrap();
        let g = Kernel::gaussian(1).gram(&x, &x).unwrap();
        assert!((g[(0, 1)] - E1).abs() < 1e-15 && (g[(1, 0)] - E1).abs() < 1e-15);
        assert_eq!(g[(0, 0)], 1.0);

        let ints = PointSet::from_1d(&[0.0, 1.0, 2.0]).unwrap();
        let s = Kernel::sinc(1).gram_sym(&ints).unwrap();
        assert!((s - DMatrix::identity(3, 3)).abs().max() < 1e-14);

        let row = Kernel::exponential(1).gram(&PointSet::from_1d(&[0.0]).unwrap(), &ints).unwrap();
        assert_eq!(row.shape(), (1, 3));
        assert!((row[(0, 1)] - E1).abs() < 1e-15 && (row[(0, 2)] - E2).abs() < 1e-15);
    }

    #[test]
    fn gram_rejects_empty() {
        let empty = PointSet::empty(1);
        let x = PointSet::from_1d(&[0.0]).unwrap();
        assert!(matches!(Kernel::gaussian(1).gram(&empty, &x), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn sinc_integer_grid_2d_is_identity() {
        let pts = PointSet::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [-2.0, 3.0]]).unwrap();
        let g = Kernel::sinc(2).gram_sym(&pts).unwrap();
        assert!((g - DMatrix::identity(4, 4)).abs().max() < 1e-14);
    }

    #[test]
    fn sinc_series_matches_direct_formula_near_zero() {
        let t = 3e-7;
        let direct = libm::sin(PI * t) / (PI * t);
        assert!((sinc(t) - direct).abs() < 1e-15);
    }

    fn family() -> impl Strategy<Value = KernelFamily> {
        prop_oneof![Just(KernelFamily::Gaussian), Just(KernelFamily::Sinc), Just(KernelFamily::Exponential)]
    }

    proptest! {
        #[test]
        fn symmetric_unit_diagonal_bounded(f in family(), x in prop::collection::vec(-5.0..5.0f64, 2), y in prop::collection::vec(-5.0..5.0f64, 2)) {
            let k = Kernel::new(f, 2).unwrap();
            let kxy = k.eval(&x, &y).unwrap();
            prop_assert_eq!(kxy, k.eval(&y, &x).unwrap());
            prop_assert_eq!(k.eval(&x, &x).unwrap(), 1.0);
            prop_assert!(kxy.abs() <= 1.0 + 1e-15);
        }

        #[test]
        fn gram_is_psd(f in family(), pts in prop::collection::vec(-3.0..3.0f64, 2..7)) {
            let mut pts = pts;
            pts.sort_by(f64::total_cmp);
            pts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            let x = PointSet::from_1d(&pts).unwrap();
            let g = Kernel::new(f, 1).unwrap().gram_sym(&x).unwrap();
            let eig = g.symmetric_eigen();
            let max = eig.eigenvalues.max();
            prop_assert!(eig.eigenvalues.min() >= -1e-10 * max);
        }
    }
}
