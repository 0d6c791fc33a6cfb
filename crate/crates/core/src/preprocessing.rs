//! Covering-variable fixing. For every ladder level h two auxiliary counts
//! bound how many allocations can be cheap or expensive:
//!
//! * H¹_h: the most allocations with cost ≤ c_(h−1). At least N − H¹_h
//!   sorted positions then cost ≥ c_(h), so u_ℓh = 1 for ℓ > H¹_h.
//! * H⁰_h: p self-allocations plus the most allocations with cost ≥ c_(h)
//!   to another node. So u_ℓh = 0 for ℓ ≤ N − H⁰_h + p.
//!
//! Both are solved exactly by enumerating facility subsets: given the open
//! set each client decides independently.

use std::fmt;

use serde::Serialize;

use crate::covering::{build_cost_ladder, CostLadder};
use crate::error::{OmtError, Result};
use crate::exec::Exec;
use crate::formulations::{u_name, MilpModel, Sorting};
use crate::instance::Instance;
use crate::subsets::{binomial, fold_subsets};

pub const DEFAULT_PREPROC_BUDGET: u128 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fix {
    Fixed0,
    Fixed1,
    NotFixed,
}

impl fmt::Display for Fix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Fix::Fixed0 => "0",
            Fix::Fixed1 => "1",
            Fix::NotFixed => "NF",
        })
    }
}

/// An H count and whether it is the exact optimum (false: the trivial
/// bound n returned because the subset budget was exceeded).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HBound {
    pub value: usize,
    pub exact: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct PreprocConfig {
    pub budget: u128,
    pub exec: Exec,
}

impl Default for PreprocConfig {
    fn default() -> Self {
        Self { budget: DEFAULT_PREPROC_BUDGET, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixingMatrix {
    pub n: usize,
    pub h_size: usize,
    /// Row-major n × |H|, column h−1 holds level h.
    pub cells: Vec<Fix>,
    pub h1: Vec<usize>,
    pub h0: Vec<usize>,
    pub exact: bool,
}

impl FixingMatrix {
    /// Cell for position ℓ (0-based) and level h (1-based).
    pub fn get(&self, l: usize, h: usize) -> Fix {
        self.cells[l * self.h_size + h - 1]
    }

    pub fn rows(&self) -> Vec<Vec<Fix>> {
        self.cells.chunks(self.h_size.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn count(&self, f: Fix) -> usize {
        self.cells.iter().filter(|&&c| c == f).count()
    }

    /// Cells contradicted by a u-matrix (rows ℓ, columns h−1).
    pub fn conflicts_with(&self, u_rows: &[Vec<f64>]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for l in 0..self.n {
            for h in 1..=self.h_size {
                let u = u_rows[l][h - 1];
                let bad = match self.get(l, h) {
                    Fix::Fixed0 => u > 0.5,
                    Fix::Fixed1 => u < 0.5,
                    Fix::NotFixed => false,
                };
                if bad {
                    out.push((l, h));
                }
            }
        }
        out
    }
}

/// Per-level H¹ and H⁰ by subset enumeration.
pub fn compute_h_bounds(inst: &Instance, ladder: &CostLadder, cfg: &PreprocConfig) -> (Vec<HBound>, Vec<HBound>) {
    let (n, p) = (inst.n(), inst.p());
    let hs = ladder.h_size();
    if binomial(n, p) > cfg.budget {
        let b = HBound { value: n, exact: false };
        return (vec![b; hs], vec![b; hs]);
    }
    let init = || (vec![0usize; hs], vec![0usize; hs]);
    let (h1, h0) = fold_subsets(
        n,
        p,
        cfg.exec,
        init,
        |acc, fac| {
            let mut open = vec![false; n];
            for &j in fac {
                open[j] = true;
            }
            // cheapest and dearest reachable levels per client
            let mut cheap = vec![0usize; hs + 1];
            let mut dear = vec![0usize; hs + 2];
            for i in 0..n {
                if open[i] {
                    cheap[0] += 1;
                    continue;
                }
                let lo = fac.iter().map(|&j| ladder.level(i, j)).min().expect("p >= 1");
                let hi = fac.iter().map(|&j| ladder.level(i, j)).max().expect("p >= 1");
                cheap[lo] += 1;
                dear[hi] += 1;
            }
            // h1[h] counts levels ≤ h−1; h0[h] counts levels ≥ h
            let mut run = 0;
            for h in 1..=hs {
                run += cheap[h - 1];
                acc.0[h - 1] = acc.0[h - 1].max(run);
            }
            let mut run = 0;
            for h in (1..=hs).rev() {
                run += dear[h];
                acc.1[h - 1] = acc.1[h - 1].max(p + run);
            }
        },
        |mut a, b| {
            for k in 0..hs {
                a.0[k] = a.0[k].max(b.0[k]);
                a.1[k] = a.1[k].max(b.1[k]);
            }
            a
        },
    );
    let wrap = |v: Vec<usize>| v.into_iter().map(|value| HBound { value, exact: true }).collect();
    (wrap(h1), wrap(h0))
}

/// H¹_h for one level h ∈ 1..=|H|.
pub fn compute_h1(inst: &Instance, h: usize) -> Result<HBound> {
    let ladder = build_cost_ladder(inst.n(), inst.cost_flat());
    check_level(&ladder, h)?;
    Ok(compute_h_bounds(inst, &ladder, &PreprocConfig::default()).0[h - 1])
}

/// H⁰_h for one level h ∈ 1..=|H|.
pub fn compute_h0(inst: &Instance, h: usize) -> Result<HBound> {
    let ladder = build_cost_ladder(inst.n(), inst.cost_flat());
    check_level(&ladder, h)?;
    Ok(compute_h_bounds(inst, &ladder, &PreprocConfig::default()).1[h - 1])
}

fn check_level(ladder: &CostLadder, h: usize) -> Result<()> {
    if h == 0 || h > ladder.h_size() {
        return Err(OmtError::InvalidArgument(format!("level h={h} outside 1..={}", ladder.h_size())));
    }
    Ok(())
}

/// Applies both fixing rules for given counts. Any upper bounds on the
/// exact counts yield valid (possibly weaker) fixings.
pub fn fixing_from_bounds(n: usize, p: usize, h1: &[usize], h0: &[usize]) -> Result<FixingMatrix> {
    if h1.len() != h0.len() {
        return Err(OmtError::InvalidArgument("H1 and H0 lengths differ".into()));
    }
    let hs = h1.len();
    let mut cells = vec![Fix::NotFixed; n * hs];
    for h in 1..=hs {
        let zero_upto = (n + p).saturating_sub(h0[h - 1]).min(n);
        for l in 0..zero_upto {
            cells[l * hs + h - 1] = Fix::Fixed0;
        }
        for l in h1[h - 1].min(n)..n {
            let c = &mut cells[l * hs + h - 1];
            if *c == Fix::Fixed0 {
                return Err(OmtError::FixingConflict { l: l + 1, h });
            }
            *c = Fix::Fixed1;
        }
    }
    Ok(FixingMatrix { n, h_size: hs, cells, h1: h1.to_vec(), h0: h0.to_vec(), exact: true })
}

pub fn build_fixing(inst: &Instance) -> Result<FixingMatrix> {
    build_fixing_with(inst, &PreprocConfig::default())
}

pub fn build_fixing_with(inst: &Instance, cfg: &PreprocConfig) -> Result<FixingMatrix> {
    let ladder = build_cost_ladder(inst.n(), inst.cost_flat());
    let (h1, h0) = compute_h_bounds(inst, &ladder, cfg);
    let exact = h1.iter().chain(&h0).all(|b| b.exact);
    let v1: Vec<usize> = h1.iter().map(|b| b.value).collect();
    let v0: Vec<usize> = h0.iter().map(|b| b.value).collect();
    let mut fix = fixing_from_bounds(inst.n(), inst.p(), &v1, &v0)?;
    fix.exact = exact;
    Ok(fix)
}

/// Turns fixed cells into bounds on the u variables of a covering model
/// (u = 0: upper 0; u = 1: lower 1). Returns the number of changed bounds.
pub fn apply_fixing(model: &mut MilpModel, fix: &FixingMatrix) -> Result<usize> {
    if model.sorting != Sorting::U {
        return Err(OmtError::Unsupported("fixings apply to covering (U) models only".into()));
    }
    if model.n != fix.n {
        return Err(OmtError::InvalidArgument("fixing matrix size does not match the model".into()));
    }
    let mut changed = 0;
    for l in 0..fix.n {
        for h in 1..=fix.h_size {
            let k = model
                .var(&u_name(l, h))
                .ok_or_else(|| OmtError::InvalidArgument(format!("model lacks {}", u_name(l, h))))?;
            let v = &mut model.variables[k];
            match fix.get(l, h) {
                Fix::Fixed0 => v.upper = 0.0,
                Fix::Fixed1 => v.lower = 1.0,
                Fix::NotFixed => continue,
            }
            changed += 1;
        }
    }
    Ok(changed)
}

/// Text tables: ladder, H¹/H⁰ per level and the fixing matrix.
pub fn render_tables(ladder: &CostLadder, fix: &FixingMatrix) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let hs = ladder.h_size();
    let _ = writeln!(s, "cost ladder (|H| = {hs}):");
    let vals: Vec<String> = ladder.values.iter().map(|v| crate::formulations::fmt_num(*v)).collect();
    let _ = writeln!(s, "  c_(h), h=0..{hs}: {}", vals.join(" "));
    let _ = writeln!(s, "fixing solutions{}:", if fix.exact { "" } else { " (budget exceeded: trivial bounds)" });
    let _ = writeln!(s, "  {:>4} {:>6} {:>6}", "h", "H1_h", "H0_h");
    for h in 1..=hs {
        let _ = writeln!(s, "  {:>4} {:>6} {:>6}", h, fix.h1[h - 1], fix.h0[h - 1]);
    }
    let _ = writeln!(s, "preproc(u) (rows l=1..{}, columns h=1..{hs}):", fix.n);
    for row in fix.rows() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>2}")).collect();
        let _ = writeln!(s, "  {}", cells.join(" "));
    }
    s
}
