//! Ordered median objective.

use crate::error::Result;
use crate::instance::{Instance, Solution};

/// Allocation costs in nondecreasing order, ties kept in client order.
/// Returns the sorted costs and the client at each position.
pub fn sorted_allocation(inst: &Instance, allocation: &[usize]) -> (Vec<f64>, Vec<usize>) {
    let mut clients: Vec<usize> = (0..allocation.len()).collect();
    let cost = |i: usize| inst.c(i, allocation[i]);
    clients.sort_by(|&a, &b| cost(a).total_cmp(&cost(b)));
    (clients.iter().map(|&i| cost(i)).collect(), clients)
}

/// (1/Σλ) Σ_ℓ λ_ℓ d_(ℓ) for an already sorted cost vector.
pub fn ordered_value(lambda: &[f64], sorted: &[f64]) -> f64 {
    let total: f64 = lambda.iter().sum();
    lambda.iter().zip(sorted).map(|(l, d)| l * d).sum::<f64>() / total
}

/// Ordered part of the objective for a given allocation.
pub fn ordered_allocation_value(inst: &Instance, lambda: &[f64], allocation: &[usize]) -> f64 {
    let mut d: Vec<f64> = allocation.iter().enumerate().map(|(i, &a)| inst.c(i, a)).collect();
    d.sort_by(f64::total_cmp);
    ordered_value(lambda, &d)
}

pub fn tree_cost(inst: &Instance, tree: &[(usize, usize)]) -> f64 {
    tree.iter().map(|&(a, b)| inst.c(a, b)).sum()
}

/// Full objective after validating the solution.
pub fn evaluate_objective(inst: &Instance, sol: &Solution) -> Result<f64> {
    sol.validate(inst)?;
    Ok(objective_unchecked(inst, sol))
}

pub fn objective_unchecked(inst: &Instance, sol: &Solution) -> f64 {
    ordered_allocation_value(inst, inst.lambda(), &sol.allocation)
        + tree_cost(inst, &sol.tree) / (inst.p() - 1) as f64
}

/// Integer key used to compare objective values across subsets: values
/// closer than 1e-10 of the largest cost compare equal, so the
/// lexicographic tie-break on facility sets takes over. The key is a
/// total order, which keeps parallel reductions deterministic.
pub fn tie_key(objective: f64, scale: f64) -> i128 {
    (objective / scale * 1e10).round() as i128
}

/// Largest cost (1 when all costs are zero).
pub fn cost_scale(inst: &Instance) -> f64 {
    let m = inst.cost_flat().iter().cloned().fold(0.0, f64::max);
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

/// Strict preference between two (objective, facility set) candidates.
pub fn better_candidate(a: (f64, &[usize]), b: (f64, &[usize]), scale: f64) -> bool {
    let (ka, kb) = (tie_key(a.0, scale), tie_key(b.0, scale));
    ka < kb || (ka == kb && a.1 < b.1)
}
