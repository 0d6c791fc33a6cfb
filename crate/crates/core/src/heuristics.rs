//! Initial solutions. Both pipelines pick facilities with a 1-swap
//! interchange local search and then connect them by an MST:
//!
//! * DOMP+MST: search on the ordered allocation value alone.
//! * PMEDT+DOMP: search on allocation value + MST/(p−1), then re-allocate
//!   every client to its nearest open facility.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{OmtError, Result};
use crate::exec::Exec;
use crate::graph::kruskal_mst;
use crate::instance::{Instance, Solution};
use crate::objective::{better_candidate, cost_scale, evaluate_objective, tie_key};
use crate::oracle::{domp_value, nearest_allocation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveMode {
    /// Ordered allocation value only.
    Ordered,
    /// Ordered allocation value plus the facility MST over p−1.
    OrderedPlusTree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HeuristicVariant {
    DompMst,
    PmedtDomp,
}

impl fmt::Display for HeuristicVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeuristicVariant::DompMst => "domp-mst",
            HeuristicVariant::PmedtDomp => "pmedt-domp",
        })
    }
}

impl FromStr for HeuristicVariant {
    type Err = OmtError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "domp-mst" => Ok(HeuristicVariant::DompMst),
            "pmedt-domp" => Ok(HeuristicVariant::PmedtDomp),
            _ => Err(OmtError::InvalidArgument(format!("unknown heuristic `{s}`; expected domp-mst or pmedt-domp"))),
        }
    }
}

/// One accepted swap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Move {
    pub removed: usize,
    pub added: usize,
    pub before: f64,
    pub after: f64,
}

impl Move {
    pub fn delta(&self) -> f64 {
        self.after - self.before
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalSearchResult {
    /// Sorted facility set.
    pub facilities: Vec<usize>,
    pub value: f64,
    pub trace: Vec<Move>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeuristicResult {
    pub solution: Solution,
    pub objective: f64,
    pub trace: Vec<Move>,
    pub variant: HeuristicVariant,
}

#[derive(Clone, Copy, Debug)]
pub struct HeuristicConfig {
    /// Search with median weights (all ones) instead of the instance λ.
    pub force_median: bool,
    /// Number of starting sets; start 0 is the plain greedy seed, start s
    /// forces node s−1 to open first.
    pub starts: usize,
    pub exec: Exec,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self { force_median: false, starts: 1, exec: Exec::default() }
    }
}

fn search_value(inst: &Instance, lambda: &[f64], mode: ObjectiveMode, fac: &[usize]) -> f64 {
    let d = domp_value(inst, lambda, fac);
    match mode {
        ObjectiveMode::Ordered => d,
        ObjectiveMode::OrderedPlusTree => {
            let (_, mst) = kruskal_mst(inst, fac).expect("nonempty facility set");
            d + mst / (fac.len().max(2) - 1) as f64
        }
    }
}

/// Greedy add: repeatedly open the node that minimises the ordered value of
/// the current set plus that node (lowest index on ties).
pub fn greedy_seed(inst: &Instance, lambda: &[f64], first: Option<usize>) -> Vec<usize> {
    let (n, p) = (inst.n(), inst.p());
    let scale = cost_scale(inst);
    let mut open: Vec<usize> = first.into_iter().collect();
    while open.len() < p {
        let mut best: Option<(i128, usize)> = None;
        for v in 0..n {
            if open.contains(&v) {
                continue;
            }
            let mut trial = open.clone();
            trial.push(v);
            let k = tie_key(domp_value(inst, lambda, &trial), scale);
            if best.is_none_or(|(bk, _)| k < bk) {
                best = Some((k, v));
            }
        }
        open.push(best.expect("p <= n leaves a candidate").1);
    }
    open.sort_unstable();
    open
}

/// Best-improvement 1-swap local search from `start` (|start| = p).
pub fn domp_local_search(inst: &Instance, mode: ObjectiveMode, start: &[usize]) -> Result<LocalSearchResult> {
    local_search_with(inst, inst.lambda(), mode, start)
}

fn local_search_with(inst: &Instance, lambda: &[f64], mode: ObjectiveMode, start: &[usize]) -> Result<LocalSearchResult> {
    let (n, p) = (inst.n(), inst.p());
    let mut cur = start.to_vec();
    cur.sort_unstable();
    cur.dedup();
    if cur.len() != p || cur.iter().any(|&v| v >= n) {
        return Err(OmtError::InvalidArgument(format!("start must hold {p} distinct nodes below {n}")));
    }
    let scale = cost_scale(inst);
    let mut value = search_value(inst, lambda, mode, &cur);
    let mut trace = Vec::new();
    loop {
        let mut best: Option<(f64, Vec<usize>, usize, usize)> = None;
        for pos in 0..p {
            for v in 0..n {
                if cur.binary_search(&v).is_ok() {
                    continue;
                }
                let mut trial = cur.clone();
                trial[pos] = v;
                trial.sort_unstable();
                let val = search_value(inst, lambda, mode, &trial);
                let beats_best = match &best {
                    None => true,
                    Some((bv, bs, _, _)) => better_candidate((val, &trial), (*bv, bs), scale),
                };
                if tie_key(val, scale) < tie_key(value, scale) && beats_best {
                    best = Some((val, trial, cur[pos], v));
                }
            }
        }
        let Some((val, trial, removed, added)) = best else { break };
        trace.push(Move { removed, added, before: value, after: val });
        cur = trial;
        value = val;
    }
    Ok(LocalSearchResult { facilities: cur, value, trace })
}

fn finish(inst: &Instance, facilities: Vec<usize>, trace: Vec<Move>, variant: HeuristicVariant) -> Result<HeuristicResult> {
    let allocation = nearest_allocation(inst, &facilities)?;
    let (tree, _) = kruskal_mst(inst, &facilities)?;
    let solution = Solution::new(facilities, allocation, tree);
    let objective = evaluate_objective(inst, &solution)?;
    Ok(HeuristicResult { solution, objective, trace, variant })
}

pub fn heuristic_domp_mst(inst: &Instance) -> Result<HeuristicResult> {
    run_heuristic(inst, HeuristicVariant::DompMst, &HeuristicConfig::default())
}

pub fn heuristic_pmedt_domp(inst: &Instance) -> Result<HeuristicResult> {
    run_heuristic(inst, HeuristicVariant::PmedtDomp, &HeuristicConfig::default())
}

/// Runs a variant from `cfg.starts` seeds and keeps the best final
/// solution (objective, then lexicographic facility set).
pub fn run_heuristic(inst: &Instance, variant: HeuristicVariant, cfg: &HeuristicConfig) -> Result<HeuristicResult> {
    let ones = vec![1.0; inst.n()];
    let lambda: &[f64] = if cfg.force_median { &ones } else { inst.lambda() };
    let mode = match variant {
        HeuristicVariant::DompMst => ObjectiveMode::Ordered,
        HeuristicVariant::PmedtDomp => ObjectiveMode::OrderedPlusTree,
    };
    let starts = cfg.starts.clamp(1, inst.n() + 1);
    let runs = cfg.exec.map_indexed(starts, |s| -> Result<HeuristicResult> {
        let seed = greedy_seed(inst, lambda, s.checked_sub(1));
        let ls = local_search_with(inst, lambda, mode, &seed)?;
        finish(inst, ls.facilities, ls.trace, variant)
    });
    let scale = cost_scale(inst);
    let mut best: Option<HeuristicResult> = None;
    for r in runs {
        let r = r?;
        let replace = match &best {
            None => true,
            Some(b) => better_candidate((r.objective, &r.solution.facilities), (b.objective, &b.solution.facilities), scale),
        };
        if replace {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one start"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::appendix_b;

    #[test]
    fn appendix_b_reaches_optimum() {
        let inst = appendix_b();
        for r in [heuristic_domp_mst(&inst).unwrap(), heuristic_pmedt_domp(&inst).unwrap()] {
            assert!(r.objective >= 2.0 - 1e-12);
            if r.solution.facilities == vec![0, 2] {
                assert!((r.objective - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn optimum_start_is_kept() {
        let inst = appendix_b();
        let ls = domp_local_search(&inst, ObjectiveMode::OrderedPlusTree, &[0, 2]).unwrap();
        assert_eq!(ls.facilities, vec![0, 2]);
        assert!(ls.trace.is_empty());
    }

    #[test]
    fn bad_start_is_rejected() {
        let inst = appendix_b();
        assert!(domp_local_search(&inst, ObjectiveMode::Ordered, &[0, 0]).is_err());
        assert!(domp_local_search(&inst, ObjectiveMode::Ordered, &[0]).is_err());
    }

    #[test]
    fn variant_names() {
        assert_eq!("pmedt-domp".parse::<HeuristicVariant>().unwrap(), HeuristicVariant::PmedtDomp);
        assert_eq!(HeuristicVariant::DompMst.to_string(), "domp-mst");
        assert!("tabu".parse::<HeuristicVariant>().is_err());
    }
}
