//! MST subproblem for fixed facilities: the Kipp-Martin primal F^km and
//! its dual F^SP, whose optimal duals give the dual optimality cut.

use crate::error::{OmtError, Result};
use crate::graph::kruskal_mst;
use crate::instance::Instance;
use crate::lp::{solve_lp, LpProblem, LpStatus, RowSense, Sense};

pub const DUAL_TOL: f64 = 1e-6;

/// Position of each edge (i<j) in row-major upper-triangle order.
#[derive(Clone, Debug)]
pub(crate) struct EdgeIndex {
    n: usize,
    id: Vec<usize>,
    pub(crate) list: Vec<(usize, usize)>,
}

impl EdgeIndex {
    pub(crate) fn new(n: usize) -> Self {
        let mut id = vec![usize::MAX; n * n];
        let mut list = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                id[i * n + j] = list.len();
                id[j * n + i] = list.len();
                list.push((i, j));
            }
        }
        Self { n, id, list }
    }

    #[inline]
    pub(crate) fn of(&self, i: usize, j: usize) -> usize {
        self.id[i * self.n + j]
    }
}

/// Values of the F^SP variables. β_ki at `beta[k·n + i]` (k ≠ i), γ^k_e at
/// `gamma[k·|E| + e]` (k ∉ e), τ_e and η_e per edge in upper-triangle order.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSolution {
    pub n: usize,
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub tau: Vec<f64>,
    pub eta: Vec<f64>,
}

impl DualSolution {
    fn zeros(n: usize) -> Self {
        let e = n * n.saturating_sub(1) / 2;
        Self { n, alpha: 0.0, beta: vec![0.0; n * n], gamma: vec![0.0; n * e], tau: vec![0.0; e], eta: vec![0.0; e] }
    }

    pub fn num_edges(&self) -> usize {
        self.tau.len()
    }

    /// α(p−1) − Σβ − Σ(x_ii τ_ij + x_jj η_ij) at a diagonal x (length n).
    pub fn objective(&self, p: usize, x_diag: &[f64]) -> f64 {
        let n = self.n;
        let mut v = self.alpha * (p as f64 - 1.0) - self.beta.iter().sum::<f64>();
        let mut e = 0;
        for i in 0..n {
            for j in i + 1..n {
                v -= x_diag[i] * self.tau[e] + x_diag[j] * self.eta[e];
                e += 1;
            }
        }
        v
    }

    /// Largest violation of the F^SP rows and sign restrictions.
    pub fn max_violation(&self, inst: &Instance) -> f64 {
        let n = self.n;
        let idx = EdgeIndex::new(n);
        let ne = idx.list.len();
        let mut worst: f64 = 0.0;
        for (k, &b) in self.beta.iter().enumerate() {
            if k / n != k % n {
                worst = worst.max(-b);
            }
        }
        for e in 0..ne {
            worst = worst.max(-self.tau[e]).max(-self.eta[e]);
        }
        for (e, &(i, j)) in idx.list.iter().enumerate() {
            let gsum: f64 = (0..n).filter(|&k| k != i && k != j).map(|k| self.gamma[k * ne + e]).sum();
            let lhs = self.alpha - self.beta[i * n + j] - self.beta[j * n + i] - gsum - self.tau[e] - self.eta[e];
            worst = worst.max(lhs - inst.c(i, j));
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if i != j && i != k && j != k {
                        let lhs = -self.beta[k * n + i] + self.gamma[k * ne + idx.of(i, j)];
                        worst = worst.max(lhs);
                    }
                }
            }
        }
        worst
    }
}

/// Column layout of the F^SP LP over `m` nodes.
struct SpLayout {
    m: usize,
    ne: usize,
}

impl SpLayout {
    fn alpha(&self) -> usize {
        0
    }
    fn beta(&self, k: usize, i: usize) -> usize {
        1 + k * self.m + i
    }
    fn gamma(&self, k: usize, e: usize) -> usize {
        1 + self.m * self.m + k * self.ne + e
    }
    fn tau(&self, e: usize) -> usize {
        1 + self.m * self.m + self.m * self.ne + e
    }
    fn eta(&self, e: usize) -> usize {
        1 + self.m * self.m + self.m * self.ne + self.ne + e
    }
    fn len(&self) -> usize {
        1 + self.m * self.m + self.m * self.ne + 2 * self.ne
    }
}

/// F^SP as an LP over `m` nodes with costs `c` and diagonal `x_diag`.
/// Columns that do not exist (β_kk, γ^k_e with k ∈ e) are fixed at 0.
fn sp_lp(m: usize, p: usize, c: &dyn Fn(usize, usize) -> f64, x_diag: &[f64]) -> (LpProblem, SpLayout) {
    let idx = EdgeIndex::new(m);
    let lay = SpLayout { m, ne: idx.list.len() };
    let mut lp = LpProblem::new(Sense::Maximize, lay.len());
    lp.objective[lay.alpha()] = p as f64 - 1.0;
    lp.set_free(lay.alpha());
    for k in 0..m {
        for i in 0..m {
            let b = lay.beta(k, i);
            if k == i {
                lp.upper[b] = 0.0;
            } else {
                lp.objective[b] = -1.0;
            }
        }
        for (e, &(i, j)) in idx.list.iter().enumerate() {
            let g = lay.gamma(k, e);
            if k == i || k == j {
                lp.upper[g] = 0.0;
            } else {
                lp.set_free(g);
            }
        }
    }
    for (e, &(i, j)) in idx.list.iter().enumerate() {
        lp.objective[lay.tau(e)] = -x_diag[i];
        lp.objective[lay.eta(e)] = -x_diag[j];
        let mut row = vec![(lay.alpha(), 1.0), (lay.beta(i, j), -1.0), (lay.beta(j, i), -1.0), (lay.tau(e), -1.0), (lay.eta(e), -1.0)];
        for k in 0..m {
            if k != i && k != j {
                row.push((lay.gamma(k, e), -1.0));
            }
        }
        lp.add_row(row, RowSense::Le, c(i, j));
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                if i != j && i != k && j != k {
                    lp.add_row(vec![(lay.beta(k, i), -1.0), (lay.gamma(k, idx.of(i, j)), 1.0)], RowSense::Le, 0.0);
                }
            }
        }
    }
    (lp, lay)
}

/// F^SP over the whole instance for a (possibly fractional) diagonal x̄.
pub fn build_sp_lp(inst: &Instance, x_diag: &[f64]) -> LpProblem {
    sp_lp(inst.n(), inst.p(), &|i, j| inst.c(i, j), x_diag).0
}

/// Reads a DualSolution over the whole instance from a full F^SP solution.
pub fn dual_from_full_lp(inst: &Instance, x: &[f64]) -> DualSolution {
    let n = inst.n();
    let lay = SpLayout { m: n, ne: n * (n - 1) / 2 };
    let mut d = DualSolution::zeros(n);
    d.alpha = x[lay.alpha()];
    for k in 0..n {
        for i in 0..n {
            d.beta[k * n + i] = x[lay.beta(k, i)];
        }
        for e in 0..lay.ne {
            d.gamma[k * lay.ne + e] = x[lay.gamma(k, e)];
        }
    }
    for e in 0..lay.ne {
        d.tau[e] = x[lay.tau(e)];
        d.eta[e] = x[lay.eta(e)];
    }
    d
}

/// Primal F^km for a diagonal x̄: min Σc z over z ≤ x̄_ii, z ≤ x̄_jj,
/// Σz = p−1, z_ki + Σ_{j≠k} q_kij ≤ 1 and q_kij + q_kji = z_ij.
pub fn build_km_lp(inst: &Instance, x_diag: &[f64]) -> LpProblem {
    let n = inst.n();
    let idx = EdgeIndex::new(n);
    let ne = idx.list.len();
    let mut lp = LpProblem::new(Sense::Minimize, ne);
    for (e, &(i, j)) in idx.list.iter().enumerate() {
        lp.objective[e] = inst.c(i, j);
    }
    // q_kij for k and arcs i→j with i, j ≠ k
    let mut q = vec![usize::MAX; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if i != j && i != k && j != k {
                    q[(k * n + i) * n + j] = lp.add_var(0.0, 0.0, f64::INFINITY);
                }
            }
        }
    }
    for (e, &(i, j)) in idx.list.iter().enumerate() {
        lp.add_row(vec![(e, 1.0)], RowSense::Le, x_diag[i]);
        lp.add_row(vec![(e, 1.0)], RowSense::Le, x_diag[j]);
    }
    lp.add_row((0..ne).map(|e| (e, 1.0)).collect(), RowSense::Eq, inst.p() as f64 - 1.0);
    for k in 0..n {
        for i in 0..n {
            if i == k {
                continue;
            }
            let mut row = vec![(idx.of(k, i), 1.0)];
            for j in 0..n {
                if j != k && j != i {
                    row.push((q[(k * n + i) * n + j], 1.0));
                }
            }
            lp.add_row(row, RowSense::Le, 1.0);
        }
        for (e, &(i, j)) in idx.list.iter().enumerate() {
            if i != k && j != k {
                lp.add_row(vec![(q[(k * n + i) * n + j], 1.0), (q[(k * n + j) * n + i], 1.0), (e, -1.0)], RowSense::Eq, 0.0);
            }
        }
    }
    lp
}

/// Kruskal MST cost of the facilities and an optimal F^SP dual for
/// x̄ = indicator(facilities). The LP is solved on the facility-induced
/// sub-instance and extended with zero β/γ outside it and τ/η on edges
/// leaving it (free of charge there since x̄ = 0).
pub fn solve_subproblem(inst: &Instance, facilities: &[usize]) -> Result<(f64, DualSolution)> {
    let n = inst.n();
    let mut fac = facilities.to_vec();
    fac.sort_unstable();
    fac.dedup();
    if fac.len() != inst.p() || fac.iter().any(|&v| v >= n) {
        return Err(OmtError::InvalidArgument(format!("subproblem needs {} distinct facilities", inst.p())));
    }
    let (_, mst) = kruskal_mst(inst, &fac)?;
    let p = fac.len();
    let ones = vec![1.0; p];
    let (lp, lay) = sp_lp(p, p, &|a, b| inst.c(fac[a], fac[b]), &ones);
    let res = solve_lp(&lp)?;
    if res.status != LpStatus::Optimal {
        return Err(OmtError::Lp(format!("subproblem LP ended {:?}", res.status)));
    }

    let full = EdgeIndex::new(n);
    let sub = EdgeIndex::new(p);
    let ne = full.list.len();
    let mut d = DualSolution::zeros(n);
    d.alpha = res.x[lay.alpha()];
    for a in 0..p {
        for b in 0..p {
            if a != b {
                d.beta[fac[a] * n + fac[b]] = res.x[lay.beta(a, b)].max(0.0);
            }
        }
        for (se, &(u, v)) in sub.list.iter().enumerate() {
            if a != u && a != v {
                d.gamma[fac[a] * ne + full.of(fac[u], fac[v])] = res.x[lay.gamma(a, se)];
            }
        }
    }
    for (se, &(u, v)) in sub.list.iter().enumerate() {
        let e = full.of(fac[u], fac[v]);
        d.tau[e] = res.x[lay.tau(se)].max(0.0);
        d.eta[e] = res.x[lay.eta(se)].max(0.0);
    }
    let mut is_fac = vec![false; n];
    for &v in &fac {
        is_fac[v] = true;
    }
    for (e, &(i, j)) in full.list.iter().enumerate() {
        if is_fac[i] && is_fac[j] {
            continue;
        }
        // only α acts on this row; charge the excess to a closed endpoint
        let excess = (d.alpha - inst.c(i, j)).max(0.0);
        if !is_fac[i] {
            d.tau[e] = excess;
        } else {
            d.eta[e] = excess;
        }
    }
    let dual_obj = d.objective(p, &indicator(n, &fac));
    if (dual_obj - mst).abs() > DUAL_TOL * mst.abs().max(1.0) {
        return Err(OmtError::Lp(format!("subproblem duality gap: dual {dual_obj} vs MST {mst}")));
    }
    Ok((mst, d))
}

pub(crate) fn indicator(n: usize, set: &[usize]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for &v in set {
        x[v] = 1.0;
    }
    x
}
