use alloc::format;
use alloc::vec::Vec;

use super::SearchResult;
use crate::bench::equally_spaced;
use crate::error::{invalid, Error, Result};
use crate::measure::{distance, PointSet};
use crate::objective::{Evaluation, ObjectiveSpec};

/// Largest number of subsets [`brute_force`] will enumerate.
pub const BRUTE_FORCE_BUDGET: u128 = 1_000_000;

fn check_candidates(spec: &ObjectiveSpec, candidates: &PointSet) -> Result<()> {
    if candidates.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: candidates.dim() });
    }
    if candidates.len() < spec.n() {
        return Err(invalid(format!("{} candidates cannot hold {} points", candidates.len(), spec.n())));
    }
    Ok(())
}

/// Evaluates a subset with its indices in ascending order, so equal subsets
/// give bit-identical values.
fn eval_subset(spec: &ObjectiveSpec, candidates: &PointSet, indices: &[usize]) -> Result<Evaluation> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    spec.evaluate(&candidates.select(&sorted))
}

fn finish(
    spec: &ObjectiveSpec,
    candidates: &PointSet,
    mut indices: Vec<usize>,
    converged: bool,
    history: Vec<f64>,
) -> Result<SearchResult> {
    indices.sort_unstable();
    let points = candidates.select(&indices).sorted();
    let eval = spec.evaluate(&points)?;
    if eval.penalized {
        return Err(Error::SearchFailed { best_penalty: eval.value });
    }
    Ok(SearchResult {
        points,
        objective_value: eval.value,
        starts_tried: 1,
        best_start_index: 0,
        converged,
        candidate_indices: indices,
        history,
    })
}

/// Swap-based local search over `candidates`, starting from the candidates
/// nearest to the equally spaced configuration.
pub fn greedy_exchange(spec: &ObjectiveSpec, candidates: &PointSet, sweeps: usize) -> Result<SearchResult> {
    check_candidates(spec, candidates)?;
    let n = spec.n();
    let m = candidates.len();

    let targets = equally_spaced(spec.domain(), n)?;
    let mut used = alloc::vec![false; m];
    let mut held = Vec::with_capacity(n);
    for t in targets.iter() {
        let mut pick: Option<(usize, f64)> = None;
        for (c, p) in candidates.iter().enumerate() {
            if used[c] {
                continue;
            }
            let d = distance(t, p);
            if pick.is_none_or(|(_, best)| d < best) {
                pick = Some((c, d));
            }
        }
        let (c, _) = pick.expect("enough candidates");
        used[c] = true;
        held.push(c);
    }

    let mut current = eval_subset(spec, candidates, &held)?;
    let mut history = alloc::vec![current.value];
    let mut converged = false;
    for _ in 0..sweeps {
        let mut improved = false;
        for slot in 0..n {
            let mut best: Option<(usize, Evaluation)> = None;
            let original = held[slot];
            for (c, _) in used.iter().enumerate().filter(|(_, u)| !**u) {
                held[slot] = c;
                let e = eval_subset(spec, candidates, &held)?;
                if best.as_ref().is_none_or(|(_, b)| e.cmp_key(b).is_lt()) {
                    best = Some((c, e));
                }
            }
            held[slot] = original;
            if let Some((c, e)) = best {
                if e.cmp_key(&current).is_lt() {
                    used[original] = false;
                    used[c] = true;
                    held[slot] = c;
                    current = e;
                    history.push(e.value);
                    improved = true;
                }
            }
        }
        if !improved {
            converged = true;
            break;
        }
    }
    finish(spec, candidates, held, converged, history)
}

fn binomial(m: usize, n: usize) -> u128 {
    let n = n.min(m - n);
    let mut acc: u128 = 1;
    for i in 0..n {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
        if acc > BRUTE_FORCE_BUDGET * 1024 {
            return acc;
        }
    }
    acc
}

/// Exhaustive search over every `n`-subset of `candidates`; ties go to the
/// lexicographically smallest index tuple.
pub fn brute_force(spec: &ObjectiveSpec, candidates: &PointSet) -> Result<SearchResult> {
    check_candidates(spec, candidates)?;
    let n = spec.n();
    let m = candidates.len();
    let count = binomial(m, n);
    if count > BRUTE_FORCE_BUDGET {
        return Err(invalid(format!("C({m}, {n}) subsets exceed the budget of {BRUTE_FORCE_BUDGET}")));
    }

    let mut idx: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<usize>, Evaluation)> = None;
    loop {
        let e = eval_subset(spec, candidates, &idx)?;
        if best.as_ref().is_none_or(|(_, b)| e.cmp_key(b).is_lt()) {
            best = Some((idx.clone(), e));
        }
        // next combination in lexicographic order
        let Some(i) = (0..n).rev().find(|&i| idx[i] < m - n + i) else { break };
        idx[i] += 1;
        for j in i + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
    let (indices, _) = best.expect("at least one subset");
    finish(spec, candidates, indices, true, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Kernel;
    use crate::measure::{BoxDomain, Measure};
    use crate::objective::ObjectiveKind;

    fn line(m: usize, lo: f64, hi: f64) -> PointSet {
        let v: Vec<f64> = (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect();
        PointSet::from_1d(&v).unwrap()
    }

    fn spec(kind: ObjectiveKind, kernel: Kernel, n: usize) -> ObjectiveSpec {
        let dom = BoxDomain::interval(-3.0, 3.0).unwrap();
        let mu = Measure::grid(&dom, &[40]).unwrap();
        ObjectiveSpec::new(kind, kernel, mu, dom, n).unwrap()
    }

    #[test]
    fn brute_force_single_point_picks_middle() {
        let s = spec(ObjectiveKind::Supnorm, Kernel::gaussian(1), 1);
        let r = brute_force(&s, &line(7, -3.0, 3.0)).unwrap();
        assert_eq!(r.candidate_indices, [3]);
        assert_eq!(r.points.point(0)[0], 0.0);
    }

    #[test]
    fn greedy_with_all_candidates_makes_no_swaps() {
        let s = spec(ObjectiveKind::Trace, Kernel::gaussian(1), 4);
        let c = line(4, -2.0, 2.0);
        let r = greedy_exchange(&s, &c, 10).unwrap();
        assert_eq!(r.candidate_indices, [0, 1, 2, 3]);
        assert_eq!(r.history.len(), 1);
    }

    #[test]
    fn greedy_matches_brute_force_on_small_lines() {
        for (m, n, kernel) in
            [(8, 2, Kernel::gaussian(1)), (8, 2, Kernel::exponential(1)), (10, 3, Kernel::gaussian(1))]
        {
            let s = spec(ObjectiveKind::Trace, kernel, n);
            let c = line(m, -3.0, 3.0);
            let g = greedy_exchange(&s, &c, 50).unwrap();
            let b = brute_force(&s, &c).unwrap();
            assert_eq!(g.candidate_indices, b.candidate_indices);
            assert_eq!(g.objective_value.to_bits(), b.objective_value.to_bits());
            assert!(g.history.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn brute_force_is_deterministic_and_budgeted() {
        let s = spec(ObjectiveKind::Trace, Kernel::exponential(1), 2);
        let c = line(8, -3.0, 3.0);
        assert_eq!(brute_force(&s, &c).unwrap(), brute_force(&s, &c).unwrap());
        let big = spec(ObjectiveKind::Trace, Kernel::gaussian(1), 10);
        assert!(matches!(brute_force(&big, &line(60, -3.0, 3.0)), Err(Error::InvalidArgument(_))));
        assert!(matches!(brute_force(&s, &PointSet::from_1d(&[0.0]).unwrap()), Err(Error::InvalidArgument(_))));
    }
}
