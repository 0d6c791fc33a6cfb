//! Lifting a combinatorial solution to a full variable assignment of any
//! built model.

use std::collections::VecDeque;

use crate::covering::{build_cost_ladder, lift_sorted, map_f};
use crate::error::{OmtError, Result};
use crate::instance::{Instance, Solution};

use super::model::*;

/// Parent of every node reachable from `root` over `edges`, `None` for the
/// root and unreachable nodes; plus BFS depth.
fn orient(n: usize, edges: &[(usize, usize)], root: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
    }
    (parent, depth)
}

/// Number of tree nodes in each node's subtree (own node included).
fn subtree_sizes(n: usize, parent: &[Option<usize>], depth: &[usize], members: &[bool]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).filter(|&v| members[v]).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(depth[v]));
    let mut size = vec![0usize; n];
    for &v in &order {
        size[v] += 1;
        if let Some(p) = parent[v] {
            size[p] += size[v];
        }
    }
    size
}

/// Assignment for `model` witnessing `sol`. Every row of the model holds
/// and the objective expression equals the combinatorial objective.
pub fn lift_solution(inst: &Instance, sol: &Solution, model: &MilpModel) -> Result<Assignment> {
    sol.validate(inst)?;
    if model.n != inst.n() || model.p != inst.p() {
        return Err(OmtError::InvalidArgument(format!(
            "model is for n={}, p={} but the instance has n={}, p={}",
            model.n,
            model.p,
            inst.n(),
            inst.p()
        )));
    }
    lift_raw(inst.n(), inst.cost_flat(), sol, model)
}

/// Lifting without instance validation (cost may be asymmetric).
pub fn lift_raw(n: usize, cost: &[f64], sol: &Solution, model: &MilpModel) -> Result<Assignment> {
    let mut asg = Assignment::with_capacity(model.num_vars());
    let sa = lift_sorted(n, cost, &sol.allocation, &sol.tree);
    let is_fac = sol.is_facility_mask(n);

    for i in 0..n {
        for j in 0..n {
            asg.insert(x_name(i, j), sa.x[i * n + j]);
        }
    }
    match model.sorting {
        Sorting::Xl => {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        asg.insert(xl_name(l, i, j), sa.xl_at(l, i, j));
                    }
                }
            }
        }
        Sorting::U => {
            let ladder = build_cost_ladder(n, cost);
            let ca = map_f(&sa, &ladder);
            for l in 0..n {
                for h in 1..=ladder.h_size() {
                    asg.insert(u_name(l, h), ca.u_at(l, h));
                }
            }
        }
    }

    let Some(tree) = model.tree else {
        // master: μ starts at 0
        asg.insert("mu".into(), 0.0);
        return Ok(asg);
    };

    // edge set carried by z and the nodes it spans
    let mut edges = sol.tree.clone();
    let members: Vec<bool> = match model.family {
        Family::F1 => is_fac.clone(),
        Family::F2 => {
            for i in 0..n {
                if !is_fac[i] {
                    let j = sol.allocation[i];
                    edges.push((i.min(j), i.max(j)));
                }
            }
            vec![true; n]
        }
    };
    let mut zv = vec![0.0; n * n];
    for &(a, b) in &edges {
        zv[a.min(b) * n + a.max(b)] = 1.0;
    }
    for i in 0..n {
        for j in i + 1..n {
            asg.insert(z_name(i, j), zv[i * n + j]);
        }
    }

    let first_fac = sol.facilities[0];
    match tree {
        TreeKind::Mtz => {
            let root = if model.family == Family::F1 { first_fac } else { 0 };
            let (parent, depth) = orient(n, &edges, root);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let y = if parent[j] == Some(i) { 1.0 } else { 0.0 };
                        asg.insert(format!("y_{}_{}", i + 1, j + 1), y);
                    }
                }
            }
            for i in 0..n {
                let l = if members[i] { 1.0 + depth[i] as f64 } else { 1.0 };
                asg.insert(format!("l_{}", i + 1), l);
            }
        }
        TreeKind::Flow1 | TreeKind::Flow2 => {
            let root = match (model.family, tree) {
                (Family::F1, TreeKind::Flow1) => first_fac,
                (Family::F1, _) => sol.allocation[0],
                (Family::F2, _) => 0,
            };
            let (parent, depth) = orient(n, &edges, root);
            let size = subtree_sizes(n, &parent, &depth, &members);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let f = if parent[j] == Some(i) { size[j] as f64 } else { 0.0 };
                        asg.insert(format!("f_{}_{}", i + 1, j + 1), f);
                    }
                }
            }
            if tree == TreeKind::Flow1 {
                for i in 0..n {
                    asg.insert(format!("r_{}", i + 1), if i == root { 1.0 } else { 0.0 });
                }
            }
        }
        TreeKind::Km => {
            for k in 0..n {
                // arcs point toward k (toward k's facility when k is outside the tree)
                let root = if members[k] { k } else { sol.allocation[k] };
                let (parent, _) = orient(n, &edges, root);
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            let q = if parent[i] == Some(j) { 1.0 } else { 0.0 };
                            asg.insert(format!("q_{}_{}_{}", k + 1, i + 1, j + 1), q);
                        }
                    }
                }
            }
        }
        TreeKind::Sub => {}
    }
    Ok(asg)
}
