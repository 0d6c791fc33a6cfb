//! Small dense two-phase simplex with row duals.
//!
//! Variables are shifted to their lower bound (or mirrored at their upper
//! bound, or split when free); finite upper bounds of shifted variables
//! become extra rows. Every row keeps one identity column (slack or
//! artificial), so B⁻¹ and the duals are read straight off the tableau.
//! Dantzig pricing switches to Bland's rule after a run of degenerate
//! pivots.

use crate::error::{OmtError, Result};

/// Supported problem envelope (original variables / rows).
pub const MAX_VARS: usize = 1500;
pub const MAX_ROWS: usize = 3000;

pub const FEAS_TOL: f64 = 1e-7;
pub const OPT_TOL: f64 = 1e-6;

const PIVOT_TOL: f64 = 1e-9;
const PRICE_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;
const MAX_ITER: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub coefs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// `nvars` variables with bounds [0, +∞) and zero objective.
    pub fn new(sense: Sense, nvars: usize) -> Self {
        Self {
            sense,
            objective: vec![0.0; nvars],
            rows: Vec::new(),
            lower: vec![0.0; nvars],
            upper: vec![f64::INFINITY; nvars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, coefs: Vec<(usize, f64)>, sense: RowSense, rhs: f64) -> usize {
        self.rows.push(LpRow { coefs, sense, rhs });
        self.rows.len() - 1
    }

    pub fn set_free(&mut self, j: usize) {
        self.lower[j] = f64::NEG_INFINITY;
        self.upper[j] = f64::INFINITY;
    }

    pub fn row_activity(&self, r: usize, x: &[f64]) -> f64 {
        self.rows[r].coefs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// Shadow price of each original row: ∂(optimal objective)/∂rhs.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// How an original variable is expressed through standard columns.
#[derive(Clone, Debug)]
struct VarMap {
    offset: f64,
    cols: Vec<(usize, f64)>,
}

struct Tableau {
    m: usize,
    nc: usize,
    t: Vec<f64>,
    b: Vec<f64>,
    d: Vec<f64>,
    obj: f64,
    basis: Vec<usize>,
    allowed: Vec<bool>,
    /// Columns that may be basic only at level zero.
    pinned: Vec<bool>,
    iterations: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.nc;
        let piv = self.t[r * nc + q];
        let row_r: Vec<f64> = self.t[r * nc..(r + 1) * nc].iter().map(|v| v / piv).collect();
        let nz: Vec<usize> = (0..nc).filter(|&k| row_r[k] != 0.0).collect();
        let br = self.b[r] / piv;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * nc + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * nc..(i + 1) * nc];
            for &k in &nz {
                row[k] -= f * row_r[k];
            }
            row[q] = 0.0;
            self.b[i] -= f * br;
            if self.b[i] < 0.0 && self.b[i] > -1e-11 {
                self.b[i] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for &k in &nz {
                self.d[k] -= f * row_r[k];
            }
            self.d[q] = 0.0;
            self.obj += f * br;
        }
        self.t[r * nc..(r + 1) * nc].copy_from_slice(&row_r);
        self.t[r * nc + q] = 1.0;
        self.b[r] = br;
        self.basis[r] = q;
        self.iterations += 1;
    }

    fn run(&mut self) -> Result<Outcome> {
        let nc = self.nc;
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut is_basic = vec![false; nc];
        for &c in &self.basis {
            is_basic[c] = true;
        }
        loop {
            if self.iterations > MAX_ITER {
                return Err(OmtError::Lp(format!(
                    "numerical failure: iteration limit {MAX_ITER} reached (m={}, columns={nc})",
                    self.m
                )));
            }
            let mut q = usize::MAX;
            let mut best = -PRICE_TOL;
            for j in 0..nc {
                if !self.allowed[j] || is_basic[j] {
                    continue;
                }
                if self.d[j] < best {
                    q = j;
                    if bland {
                        break;
                    }
                    best = self.d[j];
                }
            }
            if q == usize::MAX {
                return Ok(Outcome::Optimal);
            }
            let mut r = usize::MAX;
            let mut ratio = f64::INFINITY;
            for i in 0..self.m {
                let mut a = self.t[i * nc + q];
                // a basic artificial left at zero after phase 1 must stay
                // at zero, so it blocks in either direction
                if self.pinned[self.basis[i]] && a.abs() > PIVOT_TOL {
                    a = a.abs();
                }
                if a <= PIVOT_TOL {
                    continue;
                }
                let v = self.b[i].max(0.0) / a;
                let better = if r == usize::MAX || v < ratio - 1e-12 * ratio.max(1.0) {
                    true
                } else if v <= ratio + 1e-12 * ratio.max(1.0) {
                    if bland {
                        self.basis[i] < self.basis[r]
                    } else {
                        a > self.t[r * nc + q].abs()
                    }
                } else {
                    false
                };
                if better {
                    r = i;
                    ratio = v;
                }
            }
            if r == usize::MAX {
                return Ok(Outcome::Unbounded);
            }
            if ratio <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
            is_basic[self.basis[r]] = false;
            is_basic[q] = true;
            self.pivot(r, q);
        }
    }
}

/// Solves the LP. Fails only outside the envelope or on numerical trouble;
/// infeasibility and unboundedness are reported through the status.
pub fn solve_lp(p: &LpProblem) -> Result<LpResult> {
    let n = p.num_vars();
    if n > MAX_VARS || p.rows.len() > MAX_ROWS {
        return Err(OmtError::Lp(format!(
            "problem with {n} variables and {} rows exceeds the envelope ({MAX_VARS} / {MAX_ROWS})",
            p.rows.len()
        )));
    }
    if p.lower.len() != n || p.upper.len() != n {
        return Err(OmtError::Lp("bound vectors do not match the variable count".into()));
    }
    for r in &p.rows {
        if r.coefs.iter().any(|&(j, a)| j >= n || !a.is_finite()) || !r.rhs.is_finite() {
            return Err(OmtError::Lp("row references an unknown variable or a non-finite value".into()));
        }
    }
    let infeasible = || LpResult {
        status: LpStatus::Infeasible,
        x: vec![0.0; n],
        duals: vec![0.0; p.rows.len()],
        objective: f64::NAN,
        iterations: 0,
    };

    // variables -> standard columns
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (l, u) = (p.lower[j], p.upper[j]);
        if l > u {
            return Ok(infeasible());
        }
        if l.is_finite() {
            maps.push(VarMap { offset: l, cols: vec![(ncols, 1.0)] });
            if u.is_finite() {
                bound_rows.push((ncols, u - l));
            }
            ncols += 1;
        } else if u.is_finite() {
            maps.push(VarMap { offset: u, cols: vec![(ncols, -1.0)] });
            ncols += 1;
        } else {
            maps.push(VarMap { offset: 0.0, cols: vec![(ncols, 1.0), (ncols + 1, -1.0)] });
            ncols += 2;
        }
    }
    let sigma = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let mut cost = vec![0.0; ncols];
    for j in 0..n {
        for &(c, s) in &maps[j].cols {
            cost[c] += sigma * p.objective[j] * s;
        }
    }

    // standard rows: (dense coefficients, sense, rhs)
    let m = p.rows.len() + bound_rows.len();
    let mut rows_a: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut senses = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for r in &p.rows {
        let mut a = vec![0.0; ncols];
        let mut b = r.rhs;
        for &(j, v) in &r.coefs {
            b -= v * maps[j].offset;
            for &(c, s) in &maps[j].cols {
                a[c] += v * s;
            }
        }
        rows_a.push(a);
        senses.push(r.sense);
        rhs.push(b);
    }
    for &(c, ub) in &bound_rows {
        let mut a = vec![0.0; ncols];
        a[c] = 1.0;
        rows_a.push(a);
        senses.push(RowSense::Le);
        rhs.push(ub);
    }
    let mut flipped = vec![false; m];
    for i in 0..m {
        if rhs[i] < 0.0 {
            flipped[i] = true;
            rhs[i] = -rhs[i];
            rows_a[i].iter_mut().for_each(|v| *v = -*v);
            senses[i] = match senses[i] {
                RowSense::Le => RowSense::Ge,
                RowSense::Ge => RowSense::Le,
                RowSense::Eq => RowSense::Eq,
            };
        }
    }

    // columns: structural | surplus (Ge rows) | identity (one per row)
    let n_surplus = senses.iter().filter(|&&s| s == RowSense::Ge).count();
    let id0 = ncols + n_surplus;
    let nc = id0 + m;
    let mut t = vec![0.0; m * nc];
    let mut is_art = vec![false; nc];
    let mut sp = ncols;
    for i in 0..m {
        t[i * nc..i * nc + ncols].copy_from_slice(&rows_a[i]);
        if senses[i] == RowSense::Ge {
            t[i * nc + sp] = -1.0;
            sp += 1;
        }
        t[i * nc + id0 + i] = 1.0;
        is_art[id0 + i] = senses[i] != RowSense::Le;
    }
    drop(rows_a);
    let mut tab = Tableau {
        m,
        nc,
        t,
        b: rhs,
        d: vec![0.0; nc],
        obj: 0.0,
        basis: (0..m).map(|i| id0 + i).collect(),
        allowed: vec![true; nc],
        pinned: vec![false; nc],
        iterations: 0,
    };

    // phase 1
    if is_art.iter().any(|&a| a) {
        for i in 0..m {
            if is_art[id0 + i] {
                for k in 0..nc {
                    if !is_art[k] {
                        tab.d[k] -= tab.t[i * nc + k];
                    }
                }
                tab.obj += tab.b[i];
            }
        }
        tab.run()?;
        let scale = tab.b.iter().cloned().fold(1.0, f64::max);
        let infeas: f64 = (0..m).filter(|&i| is_art[tab.basis[i]]).map(|i| tab.b[i]).sum();
        if infeas > FEAS_TOL * scale {
            let mut out = infeasible();
            out.iterations = tab.iterations;
            return Ok(out);
        }
        // drive zero-level artificials out where possible
        for i in 0..m {
            if !is_art[tab.basis[i]] {
                continue;
            }
            let q = (0..id0).filter(|&k| !is_art[k]).max_by(|&a, &b| {
                tab.t[i * nc + a].abs().total_cmp(&tab.t[i * nc + b].abs()).then(b.cmp(&a))
            });
            if let Some(q) = q {
                if tab.t[i * nc + q].abs() > FEAS_TOL {
                    tab.pivot(i, q);
                }
            }
        }
        for k in 0..nc {
            if is_art[k] {
                tab.allowed[k] = false;
                tab.pinned[k] = true;
            }
        }
    }

    // phase 2
    let col_cost = |k: usize| if k < ncols { cost[k] } else { 0.0 };
    for k in 0..nc {
        let mut v = col_cost(k);
        for i in 0..m {
            v -= col_cost(tab.basis[i]) * tab.t[i * nc + k];
        }
        tab.d[k] = v;
    }
    tab.obj = (0..m).map(|i| col_cost(tab.basis[i]) * tab.b[i]).sum::<f64>();
    match tab.run()? {
        Outcome::Optimal => {}
        Outcome::Unbounded => {
            return Ok(LpResult {
                status: LpStatus::Unbounded,
                x: vec![0.0; n],
                duals: vec![0.0; p.rows.len()],
                objective: sigma * f64::NEG_INFINITY,
                iterations: tab.iterations,
            })
        }
    }

    let mut s = vec![0.0; nc];
    for i in 0..m {
        s[tab.basis[i]] = tab.b[i];
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|vm| vm.offset + vm.cols.iter().map(|&(c, sg)| sg * s[c]).sum::<f64>())
        .collect();
    let duals: Vec<f64> = (0..p.rows.len())
        .map(|r| {
            let y: f64 = (0..m).map(|i| col_cost(tab.basis[i]) * tab.t[i * nc + id0 + r]).sum();
            let y = if flipped[r] { -y } else { y };
            sigma * y
        })
        .collect();
    let objective = p.objective_value(&x);

    // residual check guards against silent numerical breakdown
    let scale = p.rows.iter().map(|r| r.rhs.abs()).fold(1.0, f64::max);
    let worst = primal_violation(p, &x);
    if worst > 1e-6 * scale {
        return Err(OmtError::Lp(format!(
            "numerical failure: primal residual {worst:.3e} after {} pivots (m={m}, columns={nc})",
            tab.iterations
        )));
    }
    Ok(LpResult { status: LpStatus::Optimal, x, duals, objective, iterations: tab.iterations })
}

/// Largest row or bound violation at `x`.
pub fn primal_violation(p: &LpProblem, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (r, row) in p.rows.iter().enumerate() {
        let a = p.row_activity(r, x);
        let v = match row.sense {
            RowSense::Le => a - row.rhs,
            RowSense::Ge => row.rhs - a,
            RowSense::Eq => (a - row.rhs).abs(),
        };
        worst = worst.max(v);
    }
    for j in 0..x.len() {
        worst = worst.max(p.lower[j] - x[j]).max(x[j] - p.upper[j]);
    }
    worst
}

/// Optimality certificate measurements for a solved LP.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KktReport {
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub complementary_slackness: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
}

impl KktReport {
    pub fn relative_gap(&self) -> f64 {
        (self.primal_objective - self.dual_objective).abs() / self.primal_objective.abs().max(1.0)
    }

    /// All measures within the documented tolerances.
    pub fn holds(&self) -> bool {
        self.primal_infeasibility <= FEAS_TOL
            && self.dual_infeasibility <= FEAS_TOL
            && self.complementary_slackness <= OPT_TOL
            && self.relative_gap() <= OPT_TOL
    }
}

/// Checks primal/dual feasibility, complementary slackness and the duality
/// gap using the reported shadow prices.
pub fn kkt_report(p: &LpProblem, r: &LpResult) -> KktReport {
    let sigma = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    // minimisation form: min σc·x with multipliers y = σ·dual
    let y: Vec<f64> = r.duals.iter().map(|d| sigma * d).collect();
    let n = p.num_vars();
    let mut d: Vec<f64> = (0..n).map(|j| sigma * p.objective[j]).collect();
    for (i, row) in p.rows.iter().enumerate() {
        for &(j, a) in &row.coefs {
            d[j] -= a * y[i];
        }
    }
    let mut dual_inf: f64 = 0.0;
    let mut cs: f64 = 0.0;
    let mut dual_obj = 0.0;
    for (i, row) in p.rows.iter().enumerate() {
        let wrong = match row.sense {
            RowSense::Le => y[i],
            RowSense::Ge => -y[i],
            RowSense::Eq => 0.0,
        };
        dual_inf = dual_inf.max(wrong);
        let slack = row.rhs - p.row_activity(i, &r.x);
        cs = cs.max((y[i] * slack).abs());
        dual_obj += row.rhs * y[i];
    }
    for j in 0..n {
        let (l, u) = (p.lower[j], p.upper[j]);
        if d[j] > 0.0 {
            if l.is_finite() {
                dual_obj += l * d[j];
                cs = cs.max((d[j] * (r.x[j] - l)).abs());
            } else {
                dual_inf = dual_inf.max(d[j]);
            }
        } else if d[j] < 0.0 {
            if u.is_finite() {
                dual_obj += u * d[j];
                cs = cs.max((d[j] * (u - r.x[j])).abs());
            } else {
                dual_inf = dual_inf.max(-d[j]);
            }
        }
    }
    KktReport {
        primal_infeasibility: primal_violation(p, &r.x),
        dual_infeasibility: dual_inf,
        complementary_slackness: cs,
        primal_objective: r.objective,
        dual_objective: sigma * dual_obj,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_single_ge_row() {
        let mut p = LpProblem::new(Sense::Minimize, 1);
        p.objective[0] = 1.0;
        p.add_row(vec![(0, 1.0)], RowSense::Ge, 3.0);
        let r = solve_lp(&p).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.x[0] - 3.0).abs() < 1e-12);
        assert!((r.duals[0] - 1.0).abs() < 1e-12);
        assert!(kkt_report(&p, &r).holds());
    }

    #[test]
    fn max_sum_le_one() {
        let mut p = LpProblem::new(Sense::Maximize, 2);
        p.objective = vec![1.0, 1.0];
        p.add_row(vec![(0, 1.0), (1, 1.0)], RowSense::Le, 1.0);
        let r = solve_lp(&p).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-12);
        assert!((r.duals[0] - 1.0).abs() < 1e-12);
        assert!(kkt_report(&p, &r).holds());
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LpProblem::new(Sense::Minimize, 1);
        p.add_row(vec![(0, 1.0)], RowSense::Ge, 2.0);
        p.add_row(vec![(0, 1.0)], RowSense::Le, 1.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
        let mut q = LpProblem::new(Sense::Maximize, 1);
        q.objective[0] = 1.0;
        assert_eq!(solve_lp(&q).unwrap().status, LpStatus::Unbounded);
        let mut b = LpProblem::new(Sense::Minimize, 1);
        b.lower[0] = 2.0;
        b.upper[0] = 1.0;
        assert_eq!(solve_lp(&b).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn free_and_bounded_variables() {
        // min x - y, x free, y in [-2, 5], x + y = 1, x >= -10
        let mut p = LpProblem::new(Sense::Minimize, 2);
        p.objective = vec![1.0, -1.0];
        p.set_free(0);
        p.lower[1] = -2.0;
        p.upper[1] = 5.0;
        p.add_row(vec![(0, 1.0), (1, 1.0)], RowSense::Eq, 1.0);
        p.add_row(vec![(0, 1.0)], RowSense::Ge, -10.0);
        let r = solve_lp(&p).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.x[0] + 4.0).abs() < 1e-9 && (r.x[1] - 5.0).abs() < 1e-9);
        assert!((r.objective + 9.0).abs() < 1e-9);
        assert!(kkt_report(&p, &r).holds());
    }

    #[test]
    fn envelope_is_enforced() {
        let p = LpProblem::new(Sense::Minimize, MAX_VARS + 1);
        assert!(solve_lp(&p).is_err());
    }
}
