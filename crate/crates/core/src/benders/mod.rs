//! Benders decomposition: the master chooses facilities and allocations
//! and carries μ for the tree term; the subproblem is the MST over the
//! chosen facilities and returns one optimality cut per iteration.

mod cuts;
mod master;
mod subproblem;

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::Serialize;

pub use cuts::{add_optimality_cut, make_cut, CutKind, OptimalityCut};
pub use master::{EnumerationMaster, Master, MasterOptions, MasterOutcome, MasterSolution};
pub use subproblem::{build_km_lp, build_sp_lp, dual_from_full_lp, solve_subproblem, DualSolution, DUAL_TOL};

use crate::error::Result;
use crate::exec::Exec;
use crate::graph::kruskal_mst;
use crate::instance::{Instance, Solution};
use crate::objective::evaluate_objective;
use crate::oracle::solution_for;
use crate::subsets::all_subsets;

/// Limits of the warm-start phase that seeds the cut pool.
#[derive(Clone, Copy, Debug)]
pub struct WarmStartConfig {
    /// Time limit of every master solve.
    pub max_time_mp: Duration,
    /// Relative gap at which a master solve may stop. The enumeration
    /// master always finishes with gap 0 unless its time limit hits.
    pub max_gap_mp: f64,
    /// Total time of the phase.
    pub max_time: Duration,
    /// Stop once (UB − LB)/UB falls to this value.
    pub max_gap: f64,
    /// Master candidates whose subproblems are solved per round.
    pub batch: usize,
}

impl Default for WarmStartConfig {
    fn default() -> Self {
        Self {
            max_time_mp: Duration::from_secs(1),
            max_gap_mp: 0.0,
            max_time: Duration::from_secs(5),
            max_gap: 0.0,
            batch: 1,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BendersConfig {
    pub cut: CutKind,
    pub max_iterations: usize,
    pub warm_start: Option<WarmStartConfig>,
    pub exec: Exec,
}

impl Default for BendersConfig {
    fn default() -> Self {
        Self { cut: CutKind::Classical, max_iterations: 100_000, warm_start: None, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub subset: Vec<usize>,
    pub cut_kind: CutKind,
}

#[derive(Clone, Debug)]
pub struct BendersResult {
    pub solution: Solution,
    pub objective: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
    pub pool: Vec<OptimalityCut>,
}

impl BendersResult {
    pub fn gap(&self) -> f64 {
        relative_gap(self.upper_bound, self.lower_bound)
    }
}

fn relative_gap(ub: f64, lb: f64) -> f64 {
    if ub.is_infinite() {
        return f64::INFINITY;
    }
    ((ub - lb) / ub.abs().max(1e-12)).max(0.0)
}

fn bounds_meet(ub: f64, lb: f64) -> bool {
    ub - lb <= 1e-9 * ub.abs().max(1.0)
}

/// Subproblem value and cut for one facility set.
fn cut_for(inst: &Instance, kind: CutKind, facilities: &[usize]) -> Result<(f64, OptimalityCut)> {
    match kind {
        CutKind::Classical => {
            let (_, mst) = kruskal_mst(inst, facilities)?;
            let dual = DualSolution { n: inst.n(), alpha: 0.0, beta: vec![], gamma: vec![], tau: vec![], eta: vec![] };
            Ok((mst, make_cut(kind, facilities, (mst, &dual), inst.p())))
        }
        CutKind::Dual => {
            let (mst, dual) = solve_subproblem(inst, facilities)?;
            Ok((mst, make_cut(kind, facilities, (mst, &dual), inst.p())))
        }
    }
}

/// Result of the warm-start phase.
#[derive(Clone, Debug)]
pub struct WarmStart {
    pub cuts: Vec<OptimalityCut>,
    /// Best (objective, facilities) met while generating cuts.
    pub incumbent: Option<(f64, Vec<usize>)>,
    pub lower_bound: f64,
    pub rounds: usize,
}

/// Bounded master/subproblem rounds that seed the cut pool. Subproblems of
/// one round's batch are solved in parallel.
pub fn warm_start(inst: &Instance, master: &mut dyn Master, cfg: &WarmStartConfig, kind: CutKind, exec: Exec) -> Result<WarmStart> {
    let start = Instant::now();
    let mut ws = WarmStart { cuts: Vec::new(), incumbent: None, lower_bound: 0.0, rounds: 0 };
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let p1 = inst.p() as f64 - 1.0;
    loop {
        let elapsed = start.elapsed();
        if elapsed >= cfg.max_time {
            break;
        }
        let deadline = Instant::now() + cfg.max_time_mp.min(cfg.max_time - elapsed);
        let opts = MasterOptions { deadline: Some(deadline), extra: cfg.batch.max(1) - 1, gap: cfg.max_gap_mp };
        let out = master.solve(inst, &ws.cuts, &opts)?;
        ws.rounds += 1;
        if out.complete {
            ws.lower_bound = ws.lower_bound.max(out.best.objective());
        }
        let fresh: Vec<MasterSolution> =
            std::iter::once(out.best).chain(out.extra).filter(|c| !seen.contains(&c.facilities)).collect();
        if fresh.is_empty() {
            break;
        }
        let solved = exec.map_slice(&fresh, |c| cut_for(inst, kind, &c.facilities));
        for (c, r) in fresh.iter().zip(solved) {
            let (mst, cut) = r?;
            let val = c.domp + mst / p1;
            if ws.incumbent.as_ref().is_none_or(|(v, _)| val < *v) {
                ws.incumbent = Some((val, c.facilities.clone()));
            }
            seen.insert(c.facilities.clone());
            ws.cuts.push(cut);
        }
        let ub = ws.incumbent.as_ref().map_or(f64::INFINITY, |(v, _)| *v);
        if relative_gap(ub, ws.lower_bound) <= cfg.max_gap {
            break;
        }
    }
    Ok(ws)
}

/// Classical loop: solve the master, raise LB, solve the MST subproblem,
/// lower UB, add one cut; repeat while UB > LB.
pub fn classical_benders(inst: &Instance, master: &mut dyn Master, cfg: &BendersConfig) -> Result<BendersResult> {
    let p1 = inst.p() as f64 - 1.0;
    let mut lb: f64 = 0.0;
    let mut ub = f64::INFINITY;
    let mut incumbent: Option<Vec<usize>> = None;
    let mut pool = Vec::new();
    let mut generated: HashSet<Vec<usize>> = HashSet::new();
    if let Some(w) = &cfg.warm_start {
        let ws = warm_start(inst, master, w, cfg.cut, cfg.exec)?;
        for c in &ws.cuts {
            generated.insert(c.generator.clone());
        }
        pool = ws.cuts;
        lb = ws.lower_bound;
        if let Some((v, s)) = ws.incumbent {
            ub = v;
            incumbent = Some(s);
        }
    }
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let out = master.solve(inst, &pool, &MasterOptions { extra: 1, ..Default::default() })?;
        let s = out.best.facilities.clone();
        let repeated = generated.contains(&s);
        let (mst, cut) = cut_for(inst, cfg.cut, &s)?;
        let val = out.best.domp + mst / p1;
        if out.complete {
            // Cuts only raise master values, so after adding this cut the
            // master optimum is at least min(runner-up, best with new cut).
            let own = out.best.domp + out.best.mu.max(cut.rhs_at(&s));
            let runner = out.extra.first().map_or(f64::INFINITY, MasterSolution::objective);
            lb = lb.max(out.best.objective()).max(own.min(runner));
        }
        if val < ub {
            ub = val;
            incumbent = Some(s.clone());
        }
        trace.push(TraceRow { iteration: iterations, lower_bound: lb, upper_bound: ub, subset: s.clone(), cut_kind: cfg.cut });
        if !repeated {
            generated.insert(s);
            pool.push(cut);
        }
        if bounds_meet(ub, lb) || repeated {
            converged = true;
            break;
        }
    }
    let facilities = incumbent.expect("at least one iteration ran");
    let solution = solution_for(inst, &facilities)?;
    let objective = evaluate_objective(inst, &solution)?;
    Ok(BendersResult { solution, objective, lower_bound: lb, upper_bound: ub, iterations, converged, trace, pool })
}

/// Bound trace as CSV: iteration, LB, UB, subset (1-based ids joined by
/// `;`), cut kind.
pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut s = String::from("iteration,lb,ub,subset,cut_kind\n");
    for r in trace {
        let ids: Vec<String> = r.subset.iter().map(|v| (v + 1).to_string()).collect();
        let _ = writeln!(s, "{},{},{},{},{}", r.iteration, r.lower_bound, r.upper_bound, ids.join(";"), r.cut_kind);
    }
    s
}

/// Largest RHS(S) − MST(S)/(p−1) over all p-subsets S (≤ 0 for a valid
/// cut), and RHS(S̄) − MST(S̄)/(p−1) at the generator.
pub fn audit_cut(inst: &Instance, cut: &OptimalityCut) -> Result<(f64, f64)> {
    let p1 = inst.p() as f64 - 1.0;
    let mut worst = f64::NEG_INFINITY;
    for s in all_subsets(inst.n(), inst.p()) {
        let (_, mst) = kruskal_mst(inst, &s)?;
        worst = worst.max(cut.rhs_at(&s) - mst / p1);
    }
    let (_, mst) = kruskal_mst(inst, &cut.generator)?;
    Ok((worst, cut.rhs_at(&cut.generator) - mst / p1))
}
