//! Master problem contract and the exact enumeration master.

use std::time::Instant;

use crate::error::{OmtError, Result};
use crate::exec::Exec;
use crate::instance::Instance;
use crate::objective::{cost_scale, tie_key};
use crate::oracle::{domp_value, nearest_allocation, DEFAULT_BUDGET};
use crate::subsets::{binomial, fold_subsets};

use super::cuts::OptimalityCut;

/// One master candidate: facilities with nearest allocation, the ordered
/// allocation value and μ = max(0, max cut RHS).
#[derive(Clone, Debug, PartialEq)]
pub struct MasterSolution {
    pub facilities: Vec<usize>,
    pub allocation: Vec<usize>,
    pub domp: f64,
    pub mu: f64,
}

impl MasterSolution {
    pub fn objective(&self) -> f64 {
        self.domp + self.mu
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MasterOptions {
    /// Stop scanning at this instant and return the incumbent.
    pub deadline: Option<Instant>,
    /// Also return up to `extra` next-best candidates.
    pub extra: usize,
    /// Relative gap at which the master may stop early (unused by the
    /// enumeration master, which proves optimality when it completes).
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct MasterOutcome {
    pub best: MasterSolution,
    pub extra: Vec<MasterSolution>,
    /// True when the whole space was examined (`best` is optimal).
    pub complete: bool,
}

/// Solves F^MP under a cut pool.
pub trait Master {
    fn solve(&mut self, inst: &Instance, pool: &[OptimalityCut], opts: &MasterOptions) -> Result<MasterOutcome>;
}

/// Enumerates every p-subset; value = ordered allocation + max(0, cuts).
#[derive(Clone, Debug)]
pub struct EnumerationMaster {
    pub exec: Exec,
    pub budget: u128,
}

impl Default for EnumerationMaster {
    fn default() -> Self {
        Self { exec: Exec::default(), budget: DEFAULT_BUDGET }
    }
}

/// Candidate ranking: quantised value, then lexicographic set.
type Ranked = Vec<(i128, f64, f64, Vec<usize>)>;

fn insert_top(list: &mut Ranked, item: (i128, f64, f64, Vec<usize>), keep: usize) {
    let pos = list.partition_point(|c| (c.0, &c.3) < (item.0, &item.3));
    if pos < keep {
        list.insert(pos, item);
        list.truncate(keep);
    }
}

impl Master for EnumerationMaster {
    fn solve(&mut self, inst: &Instance, pool: &[OptimalityCut], opts: &MasterOptions) -> Result<MasterOutcome> {
        let (n, p) = (inst.n(), inst.p());
        let total = binomial(n, p);
        if total > self.budget {
            return Err(OmtError::BudgetExceeded { subsets: total, budget: self.budget });
        }
        let scale = cost_scale(inst);
        let keep = 1 + opts.extra;
        let deadline = opts.deadline;
        let (ranked, complete): (Ranked, bool) = fold_subsets(
            n,
            p,
            self.exec,
            || (Vec::new(), true),
            |acc: &mut (Ranked, bool), s| {
                if deadline.is_some_and(|d| Instant::now() >= d) && !acc.0.is_empty() {
                    acc.1 = false;
                    return;
                }
                let domp = domp_value(inst, inst.lambda(), s);
                let mu = pool.iter().map(|c| c.rhs_at(s)).fold(0.0, f64::max);
                insert_top(&mut acc.0, (tie_key(domp + mu, scale), domp, mu, s.to_vec()), keep);
            },
            |mut a, b| {
                for item in b.0 {
                    insert_top(&mut a.0, item, keep);
                }
                (a.0, a.1 && b.1)
            },
        );
        let mut sols = ranked
            .into_iter()
            .map(|(_, domp, mu, facilities)| {
                let allocation = nearest_allocation(inst, &facilities)?;
                Ok(MasterSolution { facilities, allocation, domp, mu })
            })
            .collect::<Result<Vec<_>>>()?;
        let best = sols.remove(0);
        Ok(MasterOutcome { best, extra: sols, complete })
    }
}
