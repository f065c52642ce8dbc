use alloc::vec::Vec;

use rand::Rng;

use super::{SearchConfig, StartOutcome};
use crate::bench::equally_spaced;
use crate::error::{invalid, Result};
use crate::measure::PointSet;
use crate::objective::{Evaluation, ObjectiveSpec};
use crate::rng;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Initial configuration of `start`: equally spaced for start 0, otherwise
/// uniform in the domain from the start's own stream.
pub fn start_configuration(spec: &ObjectiveSpec, config: &SearchConfig, start: usize) -> Result<PointSet> {
    if start == 0 {
        return equally_spaced(spec.domain(), spec.n());
    }
    let mut stream = rng::start_stream(config.seed, start);
    let dom = spec.domain();
    let d = dom.dim();
    let coords = (0..spec.n() * d)
        .map(|i| {
            let axis = i % d;
            let u: f64 = stream.random();
            dom.lo()[axis] + u * dom.width(axis)
        })
        .collect();
    PointSet::new(d, coords)
}

struct Vertex {
    x: Vec<f64>,
    f: Evaluation,
}

struct Simplex<'a> {
    spec: &'a ObjectiveSpec,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Simplex<'_> {
    fn vertex(&self, mut x: Vec<f64>) -> Result<Vertex> {
        for (i, c) in x.iter_mut().enumerate() {
            *c = c.clamp(self.lo[i], self.hi[i]);
        }
        let f = self.spec.evaluate_flat(&x)?;
        Ok(Vertex { x, f })
    }

    /// `c + t (p − c)`, projected into the box.
    fn along(&self, c: &[f64], p: &[f64], t: f64) -> Result<Vertex> {
        self.vertex(c.iter().zip(p).map(|(ci, pi)| ci + t * (pi - ci)).collect())
    }
}

fn better(a: &Evaluation, b: &Evaluation) -> bool {
    a.cmp_key(b).is_lt()
}

fn spread_converged(best: &Evaluation, worst: &Evaluation, tol: f64) -> bool {
    !best.penalized && !worst.penalized && (worst.value - best.value) < tol * (1.0 + best.value.abs())
}

/// Runs bounded Nelder–Mead from start `start`.
pub fn run_start(spec: &ObjectiveSpec, config: &SearchConfig, start: usize) -> Result<StartOutcome> {
    config.validate()?;
    if start >= config.restarts {
        return Err(invalid("start index out of range"));
    }
    let max_iters = config.resolved_max_iters(spec);
    let scale = config.resolved_simplex_scale(spec);
    let x0 = start_configuration(spec, config, start)?.into_coords();
    let dim = spec.dim();
    let nv = x0.len();
    let dom = spec.domain();
    let lo: Vec<f64> = (0..nv).map(|i| dom.lo()[i % dim]).collect();
    let hi: Vec<f64> = (0..nv).map(|i| dom.hi()[i % dim]).collect();
    let nm = Simplex { spec, lo, hi };

    let mut simplex = Vec::with_capacity(nv + 1);
    simplex.push(nm.vertex(x0.clone())?);
    for i in 0..nv {
        let mut x = x0.clone();
        // step inward when the forward step would leave the box
        x[i] += if x[i] + scale <= nm.hi[i] { scale } else { -scale };
        simplex.push(nm.vertex(x)?);
    }

    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = alloc::vec![0.0; nv];
    while iterations < max_iters {
        simplex.sort_by(|a, b| a.f.cmp_key(&b.f));
        if spread_converged(&simplex[0].f, &simplex[nv].f, config.tol) {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in &simplex[..nv] {
            for (c, x) in centroid.iter_mut().zip(&v.x) {
                *c += x / nv as f64;
            }
        }
        let worst = &simplex[nv];
        let reflected = nm.along(&centroid, &worst.x, -REFLECT)?;

        if better(&reflected.f, &simplex[0].f) {
            let expanded = nm.along(&centroid, &worst.x, -EXPAND)?;
            simplex[nv] = if better(&expanded.f, &reflected.f) { expanded } else { reflected };
            continue;
        }
        if better(&reflected.f, &simplex[nv - 1].f) {
            simplex[nv] = reflected;
            continue;
        }
        let contracted = if better(&reflected.f, &worst.f) {
            let c = nm.along(&centroid, &reflected.x, CONTRACT)?;
            (!better(&reflected.f, &c.f)).then_some(c)
        } else {
            let c = nm.along(&centroid, &worst.x, CONTRACT)?;
            better(&c.f, &worst.f).then_some(c)
        };
        match contracted {
            Some(c) => simplex[nv] = c,
            None => {
                let best = simplex[0].x.clone();
                for v in simplex.iter_mut().skip(1) {
                    *v = nm.along(&best, &v.x, SHRINK)?;
                }
            }
        }
    }

    let best = simplex.into_iter().min_by(|a, b| a.f.cmp_key(&b.f)).expect("nonempty simplex");
    let points = PointSet::new(dim, best.x)?.sorted();
    let evaluation = spec.evaluate(&points)?;
    Ok(StartOutcome { start, points, evaluation, iterations, converged })
}
