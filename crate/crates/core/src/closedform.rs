//! Exact optima for small instances, used as references for the optimizer.
//!
//! For the exponential kernel on an interval `[a, b]` and two points, the
//! power function satisfies `φ² = 1 − V(x, x1, x2)` and the optimal pair
//! maximizes `min_{x∈[a,b]} V`.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::measure::BoxDomain;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointSolution {
    pub x1: f64,
    pub x2: f64,
    /// `max_{x1,x2} min_{x∈[a,b]} V`.
    pub value: f64,
}

/// `g(L) = (−e^{−L} + sqrt(e^{−2L} + 8e^{−L})) / 2`, the optimal value for an
/// interval of length `L`.
pub fn inside_value(l: f64) -> f64 {
    let e = libm::exp(-l);
    0.5 * (-e + libm::sqrt(e * e + 8.0 * e))
}

/// Best value with `x1 ≤ a < b ≤ x2`: `2e^{−L} / (1 + e^{−L})`.
pub fn straddling_value(l: f64) -> f64 {
    let e = libm::exp(-l);
    2.0 * e / (1.0 + e)
}

/// Best value with both points right of the interval: `e^{−2L}`.
pub fn one_sided_value(l: f64) -> f64 {
    libm::exp(-2.0 * l)
}

/// `min_{x∈[x1,x2]} V = 2e^{−r} / (1 + e^{−r})` with `r = x2 − x1`.
pub fn interior_min_v(r: f64) -> f64 {
    straddling_value(r)
}

pub fn exp_two_point_optimal(a: f64, b: f64) -> Result<TwoPointSolution> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(invalid("interval needs finite a < b"));
    }
    let g = inside_value(b - a);
    let half_log = 0.5 * libm::log(g);
    Ok(TwoPointSolution { x1: a - half_log, x2: b + half_log, value: g })
}

/// `V(x, x1, x2) = k_xᵀ K[X]⁻¹ k_x` for the exponential kernel in 1D.
pub fn v_function(x: f64, x1: f64, x2: f64) -> Result<f64> {
    if !(x.is_finite() && x1.is_finite() && x2.is_finite()) {
        return Err(invalid("V needs finite arguments"));
    }
    if x1 == x2 {
        return Err(invalid("V is undefined for coincident points"));
    }
    let (d1, d2, r) = ((x1 - x).abs(), (x2 - x).abs(), (x1 - x2).abs());
    let num = libm::exp(-2.0 * d1) + libm::exp(-2.0 * d2) - 2.0 * libm::exp(-(d1 + d2 + r));
    Ok(num / -libm::expm1(-2.0 * r))
}

/// Where [`supmin_v_bruteforce_in`] may place `x1 < x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRegion {
    /// Anywhere in `[a − L, b + L]`.
    Unrestricted,
    /// `a ≤ x1 < x2 ≤ b`.
    Inside,
    /// `x1 ≤ a` and `x2 ≥ b`.
    Straddling,
    /// `b ≤ x1 < x2`.
    RightOfDomain,
}

impl PairRegion {
    fn admits(self, j1: isize, j2: isize, last: isize) -> bool {
        match self {
            PairRegion::Unrestricted => true,
            PairRegion::Inside => j1 >= 0 && j2 <= last,
            PairRegion::Straddling => j1 <= 0 && j2 >= last,
            PairRegion::RightOfDomain => j1 >= last,
        }
    }
}

pub fn supmin_v_bruteforce(a: f64, b: f64, grid: usize) -> Result<TwoPointSolution> {
    supmin_v_bruteforce_in(a, b, grid, PairRegion::Unrestricted)
}

/// Grid search for `max_{x1<x2} min_{x} V(x, x1, x2)`. The `x` grid has
/// `grid` equally spaced points on `[a, b]` (endpoints included); pair
/// coordinates range over the same lattice extended by `L` on both sides.
/// Ties keep the lexicographically first pair.
pub fn supmin_v_bruteforce_in(a: f64, b: f64, grid: usize, region: PairRegion) -> Result<TwoPointSolution> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(invalid("interval needs finite a < b"));
    }
    if grid < 50 {
        return Err(invalid("brute-force grid needs at least 50 points"));
    }
    let last = (grid - 1) as isize;
    let h = (b - a) / last as f64;
    // All distances are integer multiples of h; tabulate e^{−t h}.
    let span = (3 * last) as usize;
    let table: Vec<f64> = (0..=2 * span + 1).map(|t| libm::exp(-(t as f64) * h)).collect();
    let e = |t: isize| table[t as usize];

    let mut best: Option<(isize, isize, f64)> = None;
    for j1 in -last..=2 * last {
        for j2 in j1 + 1..=2 * last {
            if !region.admits(j1, j2, last) {
                continue;
            }
            let r = j2 - j1;
            let denom = 1.0 - e(2 * r);
            let floor = best.map_or(f64::NEG_INFINITY, |b| b.2);
            let mut min_v = f64::INFINITY;
            for i in 0..=last {
                let (d1, d2) = ((j1 - i).abs(), (j2 - i).abs());
                let v = (e(2 * d1) + e(2 * d2) - 2.0 * e(d1 + d2 + r)) / denom;
                if v < min_v {
                    min_v = v;
                    if min_v <= floor {
                        break;
                    }
                }
            }
            if min_v > floor {
                best = Some((j1, j2, min_v));
            }
        }
    }
    let (j1, j2, value) = best.ok_or_else(|| invalid("region admits no grid pair"))?;
    Ok(TwoPointSolution { x1: a + j1 as f64 * h, x2: a + j2 as f64 * h, value })
}

/// Chebyshev center of the box, the one-point optimum for radial kernels.
pub fn radial_one_point_optimal(domain: &BoxDomain) -> Vec<f64> {
    domain.center()
}
