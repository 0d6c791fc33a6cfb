//! Unique-cost ladder, covering variables and the maps between the
//! sorting variables x^ℓ_ij and the covering variables u_ℓh.
//!
//! Covering operations accept square matrices that need not be symmetric
//! or have a zero diagonal. Indices are 0-based: position ℓ ∈ 0..n, ladder
//! level h ∈ 1..=H (level 0 is cost zero).

use crate::error::{OmtError, Result};

pub const TOL: f64 = 1e-9;

fn same_cost(a: f64, b: f64) -> bool {
    (b - a).abs() <= TOL * a.abs().max(b.abs())
}

/// c_(0)=0 < c_(1) < … < c_(H) over the distinct nonzero matrix entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CostLadder {
    n: usize,
    /// values[0] = 0, values[h] = c_(h)
    pub values: Vec<f64>,
    /// multiplicities[h] = occurrences of c_(h) above the diagonal
    /// (index 0 unused)
    pub multiplicities: Vec<usize>,
    pub alpha_hat: usize,
    pub chi0_hat: usize,
    /// ladder level of each cell, row-major (0 for zero cost)
    level: Vec<usize>,
    /// cells at each level, row-major order
    cells: Vec<Vec<usize>>,
}

impl CostLadder {
    pub fn h_size(&self) -> usize {
        self.values.len() - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Level h of cell (i, j): c_ij = c_(h).
    #[inline]
    pub fn level(&self, i: usize, j: usize) -> usize {
        self.level[i * self.n + j]
    }

    /// Cells (row-major indices) whose cost equals c_(h).
    pub fn cells_at(&self, h: usize) -> &[usize] {
        &self.cells[h]
    }

    /// Level of an arbitrary cost value, if on the ladder.
    pub fn level_of(&self, c: f64) -> Option<usize> {
        if c == 0.0 {
            return Some(0);
        }
        self.values.iter().position(|&v| v != 0.0 && same_cost(v, c))
    }
}

/// Builds the ladder of a square row-major matrix.
pub fn build_cost_ladder(n: usize, cost: &[f64]) -> CostLadder {
    assert_eq!(cost.len(), n * n, "cost matrix must be n×n");
    let mut order: Vec<usize> = (0..n * n).filter(|&k| cost[k] != 0.0).collect();
    order.sort_by(|&a, &b| cost[a].total_cmp(&cost[b]).then(a.cmp(&b)));
    let mut values = vec![0.0];
    let mut level = vec![0usize; n * n];
    for &k in &order {
        let c = cost[k];
        if !same_cost(*values.last().unwrap(), c) || values.len() == 1 {
            values.push(c);
        }
        level[k] = values.len() - 1;
    }
    let h = values.len() - 1;
    let mut cells = vec![Vec::new(); h + 1];
    for (k, &l) in level.iter().enumerate() {
        cells[l].push(k);
    }
    let mut multiplicities = vec![0usize; h + 1];
    let mut chi0 = 0;
    for i in 0..n {
        for j in i + 1..n {
            let l = level[i * n + j];
            if l == 0 {
                chi0 = 1;
            } else {
                multiplicities[l] += 1;
            }
        }
    }
    let alpha_hat = multiplicities[1..].iter().map(|&m| m.saturating_sub(1)).sum();
    CostLadder { n, values, multiplicities, alpha_hat, chi0_hat: chi0, level, cells }
}

/// x, z (row-major n×n; z read on i<j) and x^ℓ_ij at `xl[ℓ·n² + i·n + j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SortedAssignment {
    pub n: usize,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub xl: Vec<f64>,
}

impl SortedAssignment {
    pub fn zeros(n: usize) -> Self {
        Self { n, x: vec![0.0; n * n], z: vec![0.0; n * n], xl: vec![0.0; n * n * n] }
    }

    #[inline]
    pub fn xl_at(&self, l: usize, i: usize, j: usize) -> f64 {
        self.xl[l * self.n * self.n + i * self.n + j]
    }

    pub fn set_xl(&mut self, l: usize, i: usize, j: usize, v: f64) {
        let n = self.n;
        self.xl[l * n * n + i * n + j] = v;
    }
}

/// x, z as in [`SortedAssignment`] and u_ℓh at `u[ℓ·H + (h−1)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveringAssignment {
    pub n: usize,
    pub h: usize,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub u: Vec<f64>,
}

impl CoveringAssignment {
    /// u_ℓh with h in 1..=H; the boundary values u_ℓ0 = 1, u_ℓ,H+1 = 0.
    #[inline]
    pub fn u_at(&self, l: usize, h: usize) -> f64 {
        if h == 0 {
            1.0
        } else if h > self.h {
            0.0
        } else {
            self.u[l * self.h + h - 1]
        }
    }

    pub fn set_u(&mut self, l: usize, h: usize, v: f64) {
        self.u[l * self.h + h - 1] = v;
    }

    /// Rows of u as nested vectors (row ℓ, column h).
    pub fn u_rows(&self) -> Vec<Vec<f64>> {
        if self.h == 0 {
            return vec![Vec::new(); self.n];
        }
        self.u.chunks(self.h).map(|r| r.to_vec()).collect()
    }

    /// Pairs (ℓ, h) with u_ℓh > u_ℓ+1,h, i.e. violated ordering rows.
    pub fn monotonicity_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for l in 0..self.n.saturating_sub(1) {
            for h in 1..=self.h {
                if self.u_at(l, h) > self.u_at(l + 1, h) + TOL {
                    out.push((l, h));
                }
            }
        }
        out
    }
}

/// Sorting variables for an allocation: position ℓ holds the ℓ-th
/// smallest allocation cost, ties by client index.
pub fn lift_sorted(n: usize, cost: &[f64], allocation: &[usize], tree: &[(usize, usize)]) -> SortedAssignment {
    let mut sa = SortedAssignment::zeros(n);
    let mut clients: Vec<usize> = (0..n).collect();
    clients.sort_by(|&a, &b| cost[a * n + allocation[a]].total_cmp(&cost[b * n + allocation[b]]));
    for (l, &i) in clients.iter().enumerate() {
        let j = allocation[i];
        sa.x[i * n + j] = 1.0;
        sa.set_xl(l, i, j, 1.0);
    }
    for &(a, b) in tree {
        sa.z[a.min(b) * n + a.max(b)] = 1.0;
    }
    sa
}

/// u_ℓh = Σ_{c_ij ≥ c_(h)} x^ℓ_ij over the full matrix.
pub fn map_f(sa: &SortedAssignment, ladder: &CostLadder) -> CoveringAssignment {
    let n = sa.n;
    let hs = ladder.h_size();
    let mut u = vec![0.0; n * hs];
    let mut mass = vec![0.0; hs + 2];
    for l in 0..n {
        mass.iter_mut().for_each(|m| *m = 0.0);
        for k in 0..n * n {
            mass[ladder.level[k]] += sa.xl[l * n * n + k];
        }
        let mut acc = 0.0;
        for h in (1..=hs).rev() {
            acc += mass[h];
            u[l * hs + h - 1] = acc;
        }
    }
    CoveringAssignment { n, h: hs, x: sa.x.clone(), z: sa.z.clone(), u }
}

/// Recovers sorting variables from covering variables. For each position
/// ℓ and level h the mass u_ℓh − u_ℓ,h+1 (with u_ℓ0 = 1, u_ℓ,H+1 = 0) is
/// spread greedily, in row-major order, over cells with cost c_(h),
/// never exceeding what x_ij leaves after positions k < ℓ.
pub fn map_g(ca: &CoveringAssignment, ladder: &CostLadder) -> Result<SortedAssignment> {
    let n = ca.n;
    check_dims(ca, ladder)?;
    for l in 0..n {
        for h in 1..ca.h {
            if ca.u_at(l, h + 1) > ca.u_at(l, h) + TOL {
                return Err(OmtError::InvalidArgument(format!(
                    "u is not monotone in h at position {} level {}",
                    l + 1,
                    h
                )));
            }
        }
    }
    let mut sa = SortedAssignment::zeros(n);
    sa.x.clone_from(&ca.x);
    sa.z.clone_from(&ca.z);
    let mut used = vec![0.0; n * n];
    for l in 0..n {
        for h in 0..=ca.h {
            let mut d = ca.u_at(l, h) - ca.u_at(l, h + 1);
            for &k in ladder.cells_at(h) {
                if d <= TOL {
                    break;
                }
                let room = (ca.x[k] - used[k]).max(0.0);
                let t = room.min(d);
                if t > 0.0 {
                    sa.xl[l * n * n + k] = t;
                    used[k] += t;
                    d -= t;
                }
            }
        }
    }
    Ok(sa)
}

/// Closed-form inverse of f when every nonzero cost occupies exactly one
/// cell: x^ℓ at the cell of c_(h) is u_ℓh − u_ℓ,h+1. Zero-cost cells are
/// outside the ladder and receive 0.
pub fn map_f_inverse_noties(ca: &CoveringAssignment, ladder: &CostLadder) -> Result<SortedAssignment> {
    let n = ca.n;
    check_dims(ca, ladder)?;
    for h in 1..=ladder.h_size() {
        if ladder.cells_at(h).len() != 1 {
            return Err(OmtError::InvalidArgument(format!(
                "cost c_({h})={} appears in {} cells; the closed-form inverse needs no ties",
                ladder.values[h],
                ladder.cells_at(h).len()
            )));
        }
    }
    let mut sa = SortedAssignment::zeros(n);
    sa.x.clone_from(&ca.x);
    sa.z.clone_from(&ca.z);
    for l in 0..n {
        for h in 1..ca.h {
            if ca.u_at(l, h + 1) > ca.u_at(l, h) + TOL {
                return Err(OmtError::InvalidArgument(format!("u is not monotone in h at position {}", l + 1)));
            }
        }
        for h in 1..=ca.h {
            let k = ladder.cells_at(h)[0];
            sa.xl[l * n * n + k] = ca.u_at(l, h) - ca.u_at(l, h + 1);
        }
    }
    Ok(sa)
}

fn check_dims(ca: &CoveringAssignment, ladder: &CostLadder) -> Result<()> {
    if ca.n != ladder.n() || ca.h != ladder.h_size() || ca.u.len() != ca.n * ca.h {
        return Err(OmtError::InvalidArgument("covering assignment does not match the ladder".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaircaseViolation {
    /// position ℓ (0-based); the row couples ℓ and ℓ+1
    pub l: usize,
    pub h: usize,
    pub lhs: f64,
}

/// Σ_{c_ij ≥ c_(h)} x^ℓ_ij + Σ_{c_ij < c_(h)} x^{ℓ+1}_ij ≤ 1 for all ℓ, h.
pub fn check_staircase(sa: &SortedAssignment, ladder: &CostLadder) -> Vec<StaircaseViolation> {
    let n = sa.n;
    let hs = ladder.h_size();
    let mut out = Vec::new();
    let level_mass = |l: usize| {
        let mut mass = vec![0.0; hs + 1];
        for k in 0..n * n {
            mass[ladder.level[k]] += sa.xl[l * n * n + k];
        }
        mass
    };
    for l in 0..n.saturating_sub(1) {
        let a = level_mass(l);
        let b = level_mass(l + 1);
        for h in 1..=hs {
            let lhs: f64 = a[h..].iter().sum::<f64>() + b[..h].iter().sum::<f64>();
            if lhs > 1.0 + TOL {
                out.push(StaircaseViolation { l, h, lhs });
            }
        }
    }
    out
}

/// (1/Σλ) Σ_ℓ Σ_ij λ_ℓ c_ij x^ℓ_ij
pub fn xl_objective(sa: &SortedAssignment, cost: &[f64], lambda: &[f64]) -> f64 {
    let n = sa.n;
    let mut acc = 0.0;
    for (l, lam) in lambda.iter().enumerate() {
        for k in 0..n * n {
            acc += lam * cost[k] * sa.xl[l * n * n + k];
        }
    }
    acc / lambda.iter().sum::<f64>()
}

/// (1/Σλ) Σ_ℓ Σ_h λ_ℓ u_ℓh (c_(h) − c_(h−1))
pub fn u_objective(ca: &CoveringAssignment, ladder: &CostLadder, lambda: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (l, lam) in lambda.iter().enumerate() {
        for h in 1..=ca.h {
            acc += lam * ca.u_at(l, h) * (ladder.values[h] - ladder.values[h - 1]);
        }
    }
    acc / lambda.iter().sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(rows: &[&[f64]]) -> Vec<f64> {
        rows.iter().flat_map(|r| r.iter().cloned()).collect()
    }

    #[test]
    fn ladder_examples() {
        let c = flat(&[&[0.0, 2.0, 4.0], &[2.0, 0.0, 0.0], &[4.0, 0.0, 0.0]]);
        let lad = build_cost_ladder(3, &c);
        assert_eq!(lad.values, vec![0.0, 2.0, 4.0]);
        assert_eq!(lad.chi0_hat, 1);
        assert_eq!(lad.alpha_hat, 0);
        let n = 5;
        let mut c = vec![7.0; n * n];
        for i in 0..n {
            c[i * n + i] = 0.0;
        }
        let lad = build_cost_ladder(n, &c);
        assert_eq!(lad.h_size(), 1);
        assert_eq!(lad.chi0_hat, 0);
        assert_eq!(lad.alpha_hat, (n * n - n) / 2 - 1);
    }

    #[test]
    fn example_integer_point_maps_to_documented_u() {
        let c = flat(&[&[0.0, 2.0, 4.0], &[2.0, 0.0, 0.0], &[4.0, 0.0, 0.0]]);
        let lad = build_cost_ladder(3, &c);
        let mut sa = SortedAssignment::zeros(3);
        // 1-based x^1_22 = x^2_32 = x^3_12 = 1
        sa.set_xl(0, 1, 1, 1.0);
        sa.set_xl(1, 2, 1, 1.0);
        sa.set_xl(2, 0, 1, 1.0);
        for (i, j) in [(1, 1), (2, 1), (0, 1)] {
            sa.x[i * 3 + j] = 1.0;
        }
        let ca = map_f(&sa, &lad);
        assert_eq!(ca.u_rows(), vec![vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]]);
        let back = map_g(&ca, &lad).unwrap();
        assert_eq!(map_f(&back, &lad), ca);
        assert_eq!(back, sa);
    }

    #[test]
    fn constant_row_lands_on_max_cell() {
        let c = flat(&[&[1.0, 3.0], &[4.0, 2.0]]);
        let lad = build_cost_ladder(2, &c);
        let mut ca = CoveringAssignment { n: 2, h: 4, x: vec![0.0; 4], z: vec![0.0; 4], u: vec![0.0; 8] };
        for h in 1..=4 {
            ca.set_u(0, h, 0.25);
        }
        let sa = map_f_inverse_noties(&ca, &lad).unwrap();
        assert_eq!(sa.xl_at(0, 1, 0), 0.25);
        assert_eq!(sa.xl.iter().filter(|&&v| v != 0.0).count(), 1);
        let tied = flat(&[&[0.0, 3.0], &[3.0, 0.0]]);
        let lad = build_cost_ladder(2, &tied);
        let ca = CoveringAssignment { n: 2, h: 1, x: vec![0.0; 4], z: vec![0.0; 4], u: vec![0.0; 2] };
        assert!(map_f_inverse_noties(&ca, &lad).is_err());
    }

    #[test]
    fn map_g_rejects_non_monotone_u() {
        let c = flat(&[&[0.0, 2.0, 4.0], &[2.0, 0.0, 0.0], &[4.0, 0.0, 0.0]]);
        let lad = build_cost_ladder(3, &c);
        let mut ca = CoveringAssignment { n: 3, h: 2, x: vec![0.0; 9], z: vec![0.0; 9], u: vec![0.0; 6] };
        ca.set_u(0, 2, 1.0);
        assert!(map_g(&ca, &lad).is_err());
    }
}
