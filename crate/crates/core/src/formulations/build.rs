//! Builders for the F1/F2 families with x^ℓ or covering sorting and every
//! tree description.

use crate::covering::{build_cost_ladder, CostLadder};
use crate::error::{OmtError, Result};
use crate::instance::Instance;

use super::model::*;

/// Data a model is built from. Unlike [`Instance`] it admits asymmetric
/// costs, nonzero diagonals and p = 1 (used by the covering examples).
#[derive(Clone, Debug, PartialEq)]
pub struct ModelInput {
    pub n: usize,
    pub p: usize,
    /// row-major n×n
    pub cost: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl ModelInput {
    pub fn from_instance(inst: &Instance) -> Self {
        Self { n: inst.n(), p: inst.p(), cost: inst.cost_flat().to_vec(), lambda: inst.lambda().to_vec() }
    }

    pub fn raw(n: usize, p: usize, cost: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        if n == 0 || cost.len() != n * n || lambda.len() != n {
            return Err(OmtError::InvalidArgument("model input dimensions disagree".into()));
        }
        if !(1..=n).contains(&p) {
            return Err(OmtError::InvalidArgument(format!("p={p} must satisfy 1 <= p <= n={n}")));
        }
        if lambda.iter().any(|&l| l < 0.0) || lambda.iter().sum::<f64>() <= 0.0 {
            return Err(OmtError::InvalidArgument("lambda must be nonnegative with positive sum".into()));
        }
        Ok(Self { n, p, cost, lambda })
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.n + j]
    }

    pub fn ladder(&self) -> CostLadder {
        build_cost_ladder(self.n, &self.cost)
    }

    /// Weight of one unit of tree cost: 1/(p−1), or 0 when p = 1.
    pub fn tree_weight(&self) -> f64 {
        if self.p > 1 {
            1.0 / (self.p - 1) as f64
        } else {
            0.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildOptions {
    /// Replace the x^ℓ ordering rows by the staircase rows.
    pub staircase: bool,
    /// Build the Benders master: allocation + sorting rows, μ ≥ 0 in the
    /// objective, no tree.
    pub with_mu: bool,
    /// Add u_ℓh ≥ u_ℓ,h+1 to covering models.
    pub redundant_covering: bool,
    /// F2: use x_ij ≤ 1 − x_ii and x_ij ≤ x_jj instead of the merged row.
    pub split_f2_allocation: bool,
    /// Lazy family carried by SUB models.
    pub sub_family: LazyFamily,
    /// Declare x continuous (x^ℓ keeps integrality).
    pub relax_x: bool,
    /// LP relaxation: drop all integrality.
    pub relaxed: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            staircase: false,
            with_mu: false,
            redundant_covering: true,
            split_f2_allocation: false,
            sub_family: LazyFamily::Subtour,
            relax_x: false,
            relaxed: false,
        }
    }
}

/// Name used for exported models, e.g. `F1_U_MTZ`.
pub fn model_name(family: Family, sorting: Sorting, tree: Option<TreeKind>, opts: &BuildOptions) -> String {
    let mut s = format!("{family}_{sorting}");
    match tree {
        Some(t) if !opts.with_mu => s.push_str(&format!("_{t}")),
        _ => s.push_str("_MP"),
    }
    if opts.staircase {
        s.push_str("_STAIR");
    }
    if opts.relaxed {
        s.push_str("_LP");
    }
    s
}

pub fn build_model(input: &ModelInput, family: Family, sorting: Sorting, tree: TreeKind, opts: &BuildOptions) -> Result<MilpModel> {
    if opts.staircase && sorting != Sorting::Xl {
        return Err(OmtError::Unsupported(
            "staircase rows replace the x^l ordering rows; supported: (F1|F2, XL, staircase)".into(),
        ));
    }
    if opts.with_mu && family != Family::F1 {
        return Err(OmtError::Unsupported("the Benders master is built from F1 only; supported: (F1, XL|U, with_mu)".into()));
    }
    if family == Family::F2 && input.p < 2 {
        return Err(OmtError::Unsupported("F2 needs p >= 2".into()));
    }
    let n = input.n;
    let tree_opt = if opts.with_mu { None } else { Some(tree) };
    let mut m = MilpModel::new(model_name(family, sorting, tree_opt, opts), family, sorting, tree_opt, n, input.p);
    let ladder = input.ladder();
    let bin = |relax: bool| if relax { VarType::Continuous } else { VarType::Binary };

    for i in 0..n {
        for j in 0..n {
            m.add_var(x_name(i, j), 0.0, 1.0, bin(opts.relax_x))?;
        }
    }
    if !opts.with_mu {
        for i in 0..n {
            for j in i + 1..n {
                m.add_var(z_name(i, j), 0.0, 1.0, VarType::Binary)?;
            }
        }
    }
    match sorting {
        Sorting::Xl => {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        m.add_var(xl_name(l, i, j), 0.0, 1.0, VarType::Binary)?;
                    }
                }
            }
        }
        Sorting::U => {
            for l in 0..n {
                for h in 1..=ladder.h_size() {
                    m.add_var(u_name(l, h), 0.0, 1.0, VarType::Binary)?;
                }
            }
        }
    }

    objective(&mut m, input, &ladder, family, sorting, opts);
    allocation_rows(&mut m, input, family, opts);
    if !opts.with_mu {
        let count = if family == Family::F1 { input.p - 1 } else { n - 1 };
        let terms = zs(&m, n).into_iter().map(|v| (v, 1.0)).collect();
        m.add_named("treeedges", terms, ConSense::Eq, count as f64);
        match family {
            Family::F1 => f1_tree(&mut m, input, tree, opts)?,
            Family::F2 => f2_tree(&mut m, input, tree, opts)?,
        }
    }
    match sorting {
        Sorting::Xl => xl_rows(&mut m, input, &ladder, opts),
        Sorting::U => u_rows(&mut m, &ladder, opts),
    }
    if opts.relaxed {
        m.relax();
    }
    Ok(m)
}

/// Convenience wrapper for instances.
pub fn build_for_instance(inst: &Instance, family: Family, sorting: Sorting, tree: TreeKind, opts: &BuildOptions) -> Result<MilpModel> {
    build_model(&ModelInput::from_instance(inst), family, sorting, tree, opts)
}

fn zs(m: &MilpModel, n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(m.v(&z_name(i, j)));
        }
    }
    out
}

fn objective(m: &mut MilpModel, input: &ModelInput, ladder: &CostLadder, family: Family, sorting: Sorting, opts: &BuildOptions) {
    let n = input.n;
    let total: f64 = input.lambda.iter().sum();
    let mut obj = Vec::new();
    match sorting {
        Sorting::Xl => {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let c = input.lambda[l] * input.c(i, j) / total;
                        if c != 0.0 {
                            obj.push((m.v(&xl_name(l, i, j)), c));
                        }
                    }
                }
            }
        }
        Sorting::U => {
            for l in 0..n {
                for h in 1..=ladder.h_size() {
                    let c = input.lambda[l] * (ladder.values[h] - ladder.values[h - 1]) / total;
                    if c != 0.0 {
                        obj.push((m.v(&u_name(l, h)), c));
                    }
                }
            }
        }
    }
    if opts.with_mu {
        let mu = m.add_var("mu", 0.0, f64::INFINITY, VarType::Continuous).expect("fresh name");
        obj.push((mu, 1.0));
    } else {
        let w = input.tree_weight();
        for i in 0..n {
            for j in i + 1..n {
                let c = input.c(i, j) * w;
                if c != 0.0 {
                    obj.push((m.v(&z_name(i, j)), c));
                }
            }
        }
        if family == Family::F2 {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        // edge (i,j) in E charges c_ij for both orientations
                        let c = input.c(i.min(j), i.max(j)) * w;
                        if c != 0.0 {
                            obj.push((m.v(&x_name(i, j)), -c));
                        }
                    }
                }
            }
        }
    }
    m.objective = obj;
}

fn allocation_rows(m: &mut MilpModel, input: &ModelInput, family: Family, opts: &BuildOptions) {
    let n = input.n;
    let x = |m: &MilpModel, i: usize, j: usize| m.v(&x_name(i, j));
    let terms = (0..n).map(|i| (x(m, i, i), 1.0)).collect();
    m.add_named("facilities", terms, ConSense::Eq, input.p as f64);
    for i in 0..n {
        let terms = (0..n).map(|j| (x(m, i, j), 1.0)).collect();
        m.add_named(format!("assign_{}", i + 1), terms, ConSense::Eq, 1.0);
    }
    match family {
        Family::F1 => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let t = vec![(x(m, i, j), 1.0), (x(m, j, j), -1.0)];
                        m.add_named(format!("open_{}_{}", i + 1, j + 1), t, ConSense::Le, 0.0);
                    }
                }
            }
            if !opts.with_mu {
                for i in 0..n {
                    for j in i + 1..n {
                        let t = vec![(m.v(&z_name(i, j)), 2.0), (x(m, i, i), -1.0), (x(m, j, j), -1.0)];
                        m.add_named(format!("link_{}_{}", i + 1, j + 1), t, ConSense::Le, 0.0);
                    }
                }
            }
        }
        Family::F2 => {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    if opts.split_f2_allocation {
                        let t = vec![(x(m, i, j), 1.0), (x(m, j, j), -1.0)];
                        m.add_named(format!("f2open_{}_{}", i + 1, j + 1), t, ConSense::Le, 0.0);
                        let t = vec![(x(m, i, j), 1.0), (x(m, i, i), 1.0)];
                        m.add_named(format!("f2close_{}_{}", i + 1, j + 1), t, ConSense::Le, 1.0);
                    } else {
                        let t = vec![(x(m, i, j), 2.0), (x(m, i, i), 1.0), (x(m, j, j), -1.0)];
                        m.add_named(format!("f2open_{}_{}", i + 1, j + 1), t, ConSense::Le, 1.0);
                    }
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    let z = m.v(&z_name(i, j));
                    let t = vec![(x(m, i, j), 1.0), (x(m, j, i), 1.0), (z, -1.0)];
                    m.add_named(format!("f2edge_{}_{}", i + 1, j + 1), t, ConSense::Le, 0.0);
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    let z = m.v(&z_name(i, j));
                    let t = vec![(z, 2.0), (x(m, i, i), -1.0), (x(m, j, j), -1.0), (x(m, i, j), -1.0), (x(m, j, i), -1.0)];
                    m.add_named(format!("f2link_{}_{}", i + 1, j + 1), t, ConSense::Le, 0.0);
                }
            }
        }
    }
}

fn xl_rows(m: &mut MilpModel, input: &ModelInput, ladder: &CostLadder, opts: &BuildOptions) {
    let n = input.n;
    for i in 0..n {
        for j in 0..n {
            let mut t: Vec<(usize, f64)> = (0..n).map(|l| (m.v(&xl_name(l, i, j)), 1.0)).collect();
            t.push((m.v(&x_name(i, j)), -1.0));
            m.add_named(format!("sortlink_{}_{}", i + 1, j + 1), t, ConSense::Eq, 0.0);
        }
    }
    for l in 0..n {
        let mut t = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                t.push((m.v(&xl_name(l, i, j)), 1.0));
            }
        }
        m.add_named(format!("position_{}", l + 1), t, ConSense::Eq, 1.0);
    }
    if opts.staircase {
        for l in 0..n.saturating_sub(1) {
            for h in 1..=ladder.h_size() {
                let mut t = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        if ladder.level(i, j) >= h {
                            t.push((m.v(&xl_name(l, i, j)), 1.0));
                        } else {
                            t.push((m.v(&xl_name(l + 1, i, j)), 1.0));
                        }
                    }
                }
                m.add_named(format!("stair_{}_{}", l + 1, h), t, ConSense::Le, 1.0);
            }
        }
    } else {
        for l in 0..n.saturating_sub(1) {
            let mut t = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let c = input.c(i, j);
                    if c != 0.0 {
                        t.push((m.v(&xl_name(l, i, j)), c));
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let c = input.c(i, j);
                    if c != 0.0 {
                        t.push((m.v(&xl_name(l + 1, i, j)), -c));
                    }
                }
            }
            m.add_named(format!("order_{}", l + 1), t, ConSense::Le, 0.0);
        }
    }
}

fn u_rows(m: &mut MilpModel, ladder: &CostLadder, opts: &BuildOptions) {
    let n = m.n;
    let hs = ladder.h_size();
    for h in 1..=hs {
        let mut t: Vec<(usize, f64)> = (0..n).map(|l| (m.v(&u_name(l, h)), 1.0)).collect();
        for i in 0..n {
            for j in 0..n {
                if ladder.level(i, j) >= h {
                    t.push((m.v(&x_name(i, j)), -1.0));
                }
            }
        }
        m.add_named(format!("cover_{h}"), t, ConSense::Eq, 0.0);
    }
    for l in 0..n.saturating_sub(1) {
        for h in 1..=hs {
            let t = vec![(m.v(&u_name(l, h)), 1.0), (m.v(&u_name(l + 1, h)), -1.0)];
            m.add_named(format!("covmono_{}_{}", l + 1, h), t, ConSense::Le, 0.0);
        }
    }
    if opts.redundant_covering {
        for l in 0..n {
            for h in 1..hs {
                let t = vec![(m.v(&u_name(l, h + 1)), 1.0), (m.v(&u_name(l, h)), -1.0)];
                m.add_named(format!("covred_{}_{}", l + 1, h), t, ConSense::Le, 0.0);
            }
        }
    }
}

fn arcs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
}

fn mtz_common(m: &mut MilpModel, n: usize) -> Result<()> {
    for (i, j) in arcs(n) {
        m.add_var(format!("y_{}_{}", i + 1, j + 1), 0.0, 1.0, VarType::Binary)?;
    }
    for i in 0..n {
        for j in i + 1..n {
            let t = vec![
                (m.v(&format!("y_{}_{}", i + 1, j + 1)), 1.0),
                (m.v(&format!("y_{}_{}", j + 1, i + 1)), 1.0),
                (m.v(&z_name(i, j)), -1.0),
            ];
            m.add_named(format!("mtz_orient_{}_{}", i + 1, j + 1), t, ConSense::Eq, 0.0);
        }
    }
    Ok(())
}

fn mtz_order(m: &mut MilpModel, n: usize) {
    let big = n as f64;
    for (i, j) in arcs(n) {
        let t = vec![
            (m.v(&format!("l_{}", i + 1)), 1.0),
            (m.v(&format!("l_{}", j + 1)), -1.0),
            (m.v(&format!("y_{}_{}", i + 1, j + 1)), big),
        ];
        m.add_named(format!("mtz_order_{}_{}", i + 1, j + 1), t, ConSense::Le, big - 1.0);
    }
}

fn flow_vars(m: &mut MilpModel, n: usize) -> Result<()> {
    for (i, j) in arcs(n) {
        m.add_var(format!("f_{}_{}", i + 1, j + 1), 0.0, f64::INFINITY, VarType::Continuous)?;
    }
    Ok(())
}

fn flow_balance_terms(m: &MilpModel, n: usize, i: usize) -> Vec<(usize, f64)> {
    let mut t = Vec::new();
    for j in 0..n {
        if j != i {
            t.push((m.v(&format!("f_{}_{}", i + 1, j + 1)), 1.0));
            t.push((m.v(&format!("f_{}_{}", j + 1, i + 1)), -1.0));
        }
    }
    t
}

fn flow_caps(m: &mut MilpModel, n: usize, cap: f64) {
    for (i, j) in arcs(n) {
        let t = vec![(m.v(&format!("f_{}_{}", i + 1, j + 1)), 1.0), (m.v(&z_name(i, j)), -cap)];
        m.add_named(format!("flow_cap_{}_{}", i + 1, j + 1), t, ConSense::Le, 0.0);
    }
}

fn km_block(m: &mut MilpModel, n: usize) -> Result<()> {
    for k in 0..n {
        for (i, j) in arcs(n) {
            m.add_var(format!("q_{}_{}_{}", k + 1, i + 1, j + 1), 0.0, f64::INFINITY, VarType::Continuous)?;
        }
    }
    let q = |m: &MilpModel, k: usize, i: usize, j: usize| m.v(&format!("q_{}_{}_{}", k + 1, i + 1, j + 1));
    for k in 0..n {
        for i in 0..n {
            for j in i + 1..n {
                let t = vec![(q(m, k, i, j), 1.0), (q(m, k, j, i), 1.0), (m.v(&z_name(i, j)), -1.0)];
                m.add_named(format!("km_orient_{}_{}_{}", k + 1, i + 1, j + 1), t, ConSense::Eq, 0.0);
            }
        }
        let t = (0..n).filter(|&j| j != k).map(|j| (q(m, k, k, j), 1.0)).collect();
        m.add_named(format!("km_root_{}", k + 1), t, ConSense::Le, 0.0);
        for i in 0..n {
            if i != k {
                let t = (0..n).filter(|&j| j != i).map(|j| (q(m, k, i, j), 1.0)).collect();
                m.add_named(format!("km_out_{}_{}", k + 1, i + 1), t, ConSense::Le, 1.0);
            }
        }
    }
    Ok(())
}

fn f1_tree(m: &mut MilpModel, input: &ModelInput, tree: TreeKind, opts: &BuildOptions) -> Result<()> {
    let n = input.n;
    let p = input.p as f64;
    match tree {
        TreeKind::Mtz => {
            mtz_common(m, n)?;
            for i in 0..n {
                m.add_var(format!("l_{}", i + 1), 1.0, p, VarType::Continuous)?;
            }
            // every facility has at most one parent; non-facilities none
            for i in 0..n {
                let mut t: Vec<(usize, f64)> =
                    (0..n).filter(|&j| j != i).map(|j| (m.v(&format!("y_{}_{}", j + 1, i + 1)), 1.0)).collect();
                t.push((m.v(&x_name(i, i)), -1.0));
                m.add_named(format!("mtz_in_{}", i + 1), t, ConSense::Le, 0.0);
            }
            mtz_order(m, n);
        }
        TreeKind::Flow1 => {
            for i in 0..n {
                m.add_var(format!("r_{}", i + 1), 0.0, 1.0, VarType::Binary)?;
            }
            flow_vars(m, n)?;
            let t = (0..n).map(|i| (m.v(&format!("r_{}", i + 1)), 1.0)).collect();
            m.add_named("flow_root", t, ConSense::Eq, 1.0);
            for i in 0..n {
                let t = vec![(m.v(&format!("r_{}", i + 1)), 1.0), (m.v(&x_name(i, i)), -1.0)];
                m.add_named(format!("flow_rootfac_{}", i + 1), t, ConSense::Le, 0.0);
            }
            for i in 0..n {
                // out − in = (p−1) r_i − (x_ii − r_i)
                let mut t = flow_balance_terms(m, n, i);
                t.push((m.v(&format!("r_{}", i + 1)), -p));
                t.push((m.v(&x_name(i, i)), 1.0));
                m.add_named(format!("flow_bal_{}", i + 1), t, ConSense::Eq, 0.0);
            }
            flow_caps(m, n, p - 1.0);
        }
        TreeKind::Flow2 => {
            flow_vars(m, n)?;
            let r = 0;
            for i in 0..n {
                // out − in = p x_ri − x_ii
                let mut t = flow_balance_terms(m, n, i);
                if i == r {
                    t.push((m.v(&x_name(r, r)), -(p - 1.0)));
                } else {
                    t.push((m.v(&x_name(r, i)), -p));
                    t.push((m.v(&x_name(i, i)), 1.0));
                }
                m.add_named(format!("flow_bal_{}", i + 1), t, ConSense::Eq, 0.0);
            }
            flow_caps(m, n, p - 1.0);
        }
        TreeKind::Km => km_block(m, n)?,
        TreeKind::Sub => m.lazy = Some(opts.sub_family),
    }
    Ok(())
}

fn f2_tree(m: &mut MilpModel, input: &ModelInput, tree: TreeKind, opts: &BuildOptions) -> Result<()> {
    let n = input.n;
    let nf = n as f64;
    match tree {
        TreeKind::Mtz => {
            mtz_common(m, n)?;
            for i in 0..n {
                let (lo, hi) = if i == 0 { (1.0, 1.0) } else { (2.0, nf) };
                m.add_var(format!("l_{}", i + 1), lo, hi, VarType::Continuous)?;
            }
            for i in 1..n {
                let t = (0..n).filter(|&j| j != i).map(|j| (m.v(&format!("y_{}_{}", j + 1, i + 1)), 1.0)).collect();
                m.add_named(format!("mtz_in_{}", i + 1), t, ConSense::Eq, 1.0);
            }
            mtz_order(m, n);
        }
        TreeKind::Flow1 => {
            for i in 0..n {
                m.add_var(format!("r_{}", i + 1), 0.0, 1.0, VarType::Binary)?;
            }
            flow_vars(m, n)?;
            let t = (0..n).map(|i| (m.v(&format!("r_{}", i + 1)), 1.0)).collect();
            m.add_named("flow_root", t, ConSense::Eq, 1.0);
            for i in 0..n {
                // out − in = (N−1) r_i − (1 − r_i)
                let mut t = flow_balance_terms(m, n, i);
                t.push((m.v(&format!("r_{}", i + 1)), -nf));
                m.add_named(format!("flow_bal_{}", i + 1), t, ConSense::Eq, -1.0);
            }
            flow_caps(m, n, nf - 1.0);
        }
        TreeKind::Flow2 => {
            flow_vars(m, n)?;
            for i in 0..n {
                let t = flow_balance_terms(m, n, i);
                let rhs = if i == 0 { nf - 1.0 } else { -1.0 };
                m.add_named(format!("flow_bal_{}", i + 1), t, ConSense::Eq, rhs);
            }
            flow_caps(m, n, nf - 1.0);
        }
        TreeKind::Km => km_block(m, n)?,
        TreeKind::Sub => m.lazy = Some(opts.sub_family),
    }
    Ok(())
}
