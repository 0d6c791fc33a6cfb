//! Exact solver by enumeration of facility subsets.
//!
//! For λ ≥ 0 the nearest allocation is optimal for a fixed facility set
//! (its sorted cost vector is componentwise minimal) and the tree is an MST
//! of the facilities, independent of the allocation. So enumerating the
//! p-subsets is exact.

use crate::error::{OmtError, Result};
use crate::exec::Exec;
use crate::graph::kruskal_mst;
use crate::instance::{Instance, Solution};
use crate::objective::{better_candidate, cost_scale, ordered_allocation_value};
use crate::subsets::{binomial, fold_subsets};

pub const DEFAULT_BUDGET: u128 = 2_000_000;

#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub budget: u128,
    pub exec: Exec,
    /// Keep every (subset, objective) pair, in colex order.
    pub keep_ranked: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, exec: Exec::default(), keep_ranked: false }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub best: Solution,
    pub objective: f64,
    pub ranked: Option<Vec<(Vec<usize>, f64)>>,
    pub subsets: u128,
}

/// Each client goes to its cheapest open facility (lowest index on ties);
/// facilities serve themselves.
pub fn nearest_allocation(inst: &Instance, facilities: &[usize]) -> Result<Vec<usize>> {
    if facilities.is_empty() {
        return Err(OmtError::InvalidArgument("nearest_allocation needs a facility".into()));
    }
    let mut sorted = facilities.to_vec();
    sorted.sort_unstable();
    Ok(nearest_sorted(inst, &sorted))
}

pub(crate) fn nearest_sorted(inst: &Instance, sorted: &[usize]) -> Vec<usize> {
    (0..inst.n())
        .map(|i| {
            let mut best = sorted[0];
            for &f in &sorted[1..] {
                if inst.c(i, f) < inst.c(i, best) {
                    best = f;
                }
            }
            // zero diagonal: a facility is its own nearest, but an equal
            // zero-cost earlier facility must not steal it
            if sorted.binary_search(&i).is_ok() {
                i
            } else {
                best
            }
        })
        .collect()
}

/// Ordered (DOMP) part for a facility set under weights `lambda`.
pub fn domp_value(inst: &Instance, lambda: &[f64], facilities: &[usize]) -> f64 {
    let mut sorted = facilities.to_vec();
    sorted.sort_unstable();
    let alloc = nearest_sorted(inst, &sorted);
    ordered_allocation_value(inst, lambda, &alloc)
}

/// Full objective of the best solution with the given facilities.
pub fn subset_objective(inst: &Instance, facilities: &[usize]) -> f64 {
    let (_, mst) = kruskal_mst(inst, facilities).expect("nonempty subset");
    domp_value(inst, inst.lambda(), facilities) + mst / (inst.p() - 1) as f64
}

/// Best solution for a fixed facility set: nearest allocation + MST.
pub fn solution_for(inst: &Instance, facilities: &[usize]) -> Result<Solution> {
    let alloc = nearest_allocation(inst, facilities)?;
    let (tree, _) = kruskal_mst(inst, facilities)?;
    Ok(Solution::new(facilities.to_vec(), alloc, tree))
}

pub fn solve_exact(inst: &Instance) -> Result<OracleResult> {
    solve_exact_with(inst, &OracleConfig::default())
}

pub fn solve_exact_with(inst: &Instance, cfg: &OracleConfig) -> Result<OracleResult> {
    let (n, p) = (inst.n(), inst.p());
    let total = binomial(n, p);
    if total > cfg.budget {
        return Err(OmtError::BudgetExceeded { subsets: total, budget: cfg.budget });
    }
    let scale = cost_scale(inst);
    type Acc = (Option<(f64, Vec<usize>)>, Vec<(Vec<usize>, f64)>);
    let keep = cfg.keep_ranked;
    let (best, ranked): Acc = fold_subsets(
        n,
        p,
        cfg.exec,
        || (None, Vec::new()),
        |acc: &mut Acc, s| {
            let v = subset_objective(inst, s);
            if keep {
                acc.1.push((s.to_vec(), v));
            }
            let replace = match &acc.0 {
                None => true,
                Some((bv, bs)) => better_candidate((v, s), (*bv, bs), scale),
            };
            if replace {
                acc.0 = Some((v, s.to_vec()));
            }
        },
        |mut a, b| {
            if let Some((bv, bs)) = b.0 {
                let replace = match &a.0 {
                    None => true,
                    Some((av, as_)) => better_candidate((bv, &bs), (*av, as_), scale),
                };
                if replace {
                    a.0 = Some((bv, bs));
                }
            }
            a.1.extend(b.1);
            a
        },
    );
    let (_, facilities) = best.expect("p <= n gives at least one subset");
    let sol = solution_for(inst, &facilities)?;
    let objective = crate::objective::evaluate_objective(inst, &sol)?;
    Ok(OracleResult { best: sol, objective, ranked: keep.then_some(ranked), subsets: total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn appendix_b_optimum() {
        let inst = fixtures::appendix_b();
        let r = solve_exact(&inst).unwrap();
        assert_eq!(r.best.facilities, vec![0, 2]);
        assert_eq!(r.best.allocation, vec![0, 0, 2, 2]);
        assert_eq!(r.best.tree, vec![(0, 2)]);
        assert!((r.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nearest_allocation_examples() {
        let inst = fixtures::appendix_b();
        assert_eq!(nearest_allocation(&inst, &[0, 2]).unwrap(), vec![0, 0, 2, 2]);
        assert_eq!(nearest_allocation(&inst, &[0, 1, 2, 3]).unwrap(), vec![0, 1, 2, 3]);
        assert!(nearest_allocation(&inst, &[]).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let inst = fixtures::fig1(crate::instance::Criterion::Median);
        let cfg = OracleConfig { budget: 10, ..Default::default() };
        assert!(matches!(solve_exact_with(&inst, &cfg), Err(OmtError::BudgetExceeded { .. })));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let inst = crate::instance::generate_instance(11, 4, (1, 20), 5, crate::instance::Criterion::KTrimmed).unwrap();
        let a = solve_exact_with(&inst, &OracleConfig { exec: Exec::Sequential, keep_ranked: true, ..Default::default() }).unwrap();
        let b = solve_exact_with(&inst, &OracleConfig { exec: Exec::Parallel, keep_ranked: true, ..Default::default() }).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.ranked, b.ranked);
    }
}
