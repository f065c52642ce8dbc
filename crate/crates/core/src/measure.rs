//! Box domains, ordered point lists and weighted node sets discretizing `μ`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{invalid, Error, Result};

/// Axis-aligned box `[lo_0, hi_0] × … × [lo_{d-1}, hi_{d-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(invalid("box domain needs at least one axis"));
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        for (axis, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(invalid(alloc::format!("axis {axis}: need finite lo < hi, got [{l}, {h}]")));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(alloc::vec![lo], alloc::vec![hi])
    }

    /// The same interval on every one of `dim` axes.
    pub fn cube(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        Self::new(alloc::vec![lo; dim], alloc::vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.width(i)).product()
    }

    /// Euclidean length of the main diagonal.
    pub fn diameter(&self) -> f64 {
        libm::sqrt((0..self.dim()).map(|i| self.width(i) * self.width(i)).sum())
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    /// Clamps a flattened list of points (row-major, `dim` coordinates each)
    /// into the box in place.
    pub fn clamp_flat(&self, coords: &mut [f64]) {
        let d = self.dim();
        for (i, c) in coords.iter_mut().enumerate() {
            let axis = i % d;
            *c = c.clamp(self.lo[axis], self.hi[axis]);
        }
    }

    /// Total distance by which the points of `set` stick out of the box.
    pub fn excess(&self, set: &PointSet) -> f64 {
        let d = self.dim();
        set.coords()
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let axis = i % d;
                if c.is_nan() {
                    return 1.0;
                }
                (self.lo[axis] - c).max(0.0) + (c - self.hi[axis]).max(0.0)
            })
            .sum()
    }
}

/// An ordered list of points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("point dimension must be positive"));
        }
        if coords.len() % dim != 0 {
            return Err(invalid(alloc::format!(
                "{} coordinates do not split into {dim}-dimensional points",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("point coordinates must be finite"));
        }
        Ok(Self { dim, coords })
    }

    /// One-dimensional points from their coordinates.
    pub fn from_1d(values: &[f64]) -> Result<Self> {
        Self::new(1, values.to_vec())
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(invalid("cannot infer dimension of an empty row list"));
        };
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * rows.len());
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim: dim.max(1), coords: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> core::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Appends a point, returning a new set.
    pub fn with_point(&self, p: &[f64]) -> Result<Self> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: p.len() });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(p);
        Self::new(self.dim, coords)
    }

    pub fn concat(&self, other: &PointSet) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(Self { dim: self.dim, coords })
    }

    /// The sub-list at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self { dim: self.dim, coords }
    }

    /// Smallest pairwise Euclidean distance; `+∞` for fewer than two points.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                best = best.min(distance(self.point(i), self.point(j)));
            }
        }
        best
    }

    /// `Σ max(0, δ − ‖x_i − x_j‖)` over all pairs.
    pub fn separation_violation(&self, delta: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                total += (delta - distance(self.point(i), self.point(j))).max(0.0);
            }
        }
        total
    }

    /// Points reordered lexicographically by coordinates.
    pub fn sorted(&self) -> Self {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| lex_cmp(self.point(a), self.point(b)).then(a.cmp(&b)));
        self.select(&order)
    }

    /// True when no two points coincide exactly.
    pub fn pairwise_distinct(&self) -> bool {
        let sorted = self.sorted();
        (1..sorted.len()).all(|i| sorted.point(i - 1) != sorted.point(i))
    }
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// A finite positive measure given by nodes and strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    nodes: PointSet,
    weights: Vec<f64>,
}

impl Measure {
    pub fn new(nodes: PointSet, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(invalid("measure needs at least one node"));
        }
        if nodes.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: nodes.len(), got: weights.len() });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("measure weights must be finite and strictly positive"));
        }
        if !nodes.pairwise_distinct() {
            return Err(invalid("measure nodes must be pairwise distinct"));
        }
        Ok(Self { nodes, weights })
    }

    /// Midpoint rule: `resolution[i]` equal cells per axis, one node at each
    /// cell center weighted by the cell volume. Nodes come out in
    /// lexicographic order.
    pub fn grid(domain: &BoxDomain, resolution: &[usize]) -> Result<Self> {
        if resolution.len() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), got: resolution.len() });
        }
        if let Some(r) = resolution.iter().find(|&&r| r < 2) {
            return Err(invalid(alloc::format!("grid resolution must be at least 2 per axis, got {r}")));
        }
        let d = domain.dim();
        let widths: Vec<f64> = (0..d).map(|i| domain.width(i) / resolution[i] as f64).collect();
        let cell: f64 = widths.iter().product();
        let total: usize = resolution.iter().product();

        let mut coords = Vec::with_capacity(total * d);
        let mut idx = alloc::vec![0usize; d];
        for _ in 0..total {
            for axis in 0..d {
                coords.push(domain.lo()[axis] + (idx[axis] as f64 + 0.5) * widths[axis]);
            }
            // odometer, last axis fastest
            for axis in (0..d).rev() {
                idx[axis] += 1;
                if idx[axis] < resolution[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        Self::new(PointSet::new(d, coords)?, alloc::vec![cell; total])
    }

    /// Uniform probability on the given points: every weight is `1/m`.
    pub fn discrete_uniform(points: PointSet) -> Result<Self> {
        let m = points.len();
        Self::new(points, alloc::vec![1.0 / m.max(1) as f64; m])
    }

    pub fn nodes(&self) -> &PointSet {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.nodes.dim()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ_k w_k · values[k]`.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: values.len() });
        }
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }
}
