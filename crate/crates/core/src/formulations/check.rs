//! Feasibility report for an assignment against a built model.

use crate::cuts::separate_connection_cut;
use crate::error::Result;

use super::model::*;
use super::separation::separate_subtour;

pub const CHECK_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct RowViolation {
    pub name: String,
    pub violation: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckReport {
    /// Largest violation over rows, bounds, integrality and lazy rows.
    pub max_violation: f64,
    /// Violated rows in model order.
    pub violated: Vec<RowViolation>,
    pub bound_violations: Vec<RowViolation>,
    pub integrality_violations: Vec<RowViolation>,
    /// Violated members of the lazy family (SUB models), named by set.
    pub lazy_violations: Vec<RowViolation>,
    pub objective: f64,
}

impl CheckReport {
    pub fn is_feasible(&self) -> bool {
        self.violated.is_empty()
            && self.bound_violations.is_empty()
            && self.integrality_violations.is_empty()
            && self.lazy_violations.is_empty()
    }

    pub fn num_violations(&self) -> usize {
        self.violated.len() + self.bound_violations.len() + self.integrality_violations.len() + self.lazy_violations.len()
    }
}

fn set_label(prefix: &str, set: &[usize]) -> String {
    let ids: Vec<String> = set.iter().map(|v| (v + 1).to_string()).collect();
    format!("{prefix}{{{}}}", ids.join(","))
}

/// Evaluates every row, bound and integrality requirement (tolerance
/// 1e-7); SUB models are also checked against their lazy family.
pub fn check_assignment(model: &MilpModel, asg: &Assignment) -> Result<CheckReport> {
    let values = dense_values(model, asg)?;
    let mut rep = CheckReport { objective: model.objective_value(&values), ..Default::default() };
    let push = |list: &mut Vec<RowViolation>, max: &mut f64, name: String, v: f64| {
        if v > CHECK_TOL {
            *max = max.max(v);
            list.push(RowViolation { name, violation: v });
        }
    };
    for c in &model.constraints {
        push(&mut rep.violated, &mut rep.max_violation, c.name.clone(), c.violation(&values));
    }
    for (var, &v) in model.variables.iter().zip(&values) {
        let b = (var.lower - v).max(v - var.upper).max(0.0);
        push(&mut rep.bound_violations, &mut rep.max_violation, var.name.clone(), b);
        if var.vtype != VarType::Continuous {
            push(&mut rep.integrality_violations, &mut rep.max_violation, var.name.clone(), (v - v.round()).abs());
        }
    }
    if let Some(family) = model.lazy {
        let n = model.n;
        let mut z = vec![0.0; n * n];
        let mut x = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                x[i * n + j] = values[model.v(&x_name(i, j))];
                if i < j {
                    z[i * n + j] = values[model.v(&z_name(i, j))];
                }
            }
        }
        match family {
            LazyFamily::Subtour => {
                for cut in separate_subtour(n, &z) {
                    push(&mut rep.lazy_violations, &mut rep.max_violation, set_label("subtour", &cut.set), cut.violation());
                }
            }
            LazyFamily::ConnectionCut => {
                for cut in separate_connection_cut(n, Some(&x), &z) {
                    push(&mut rep.lazy_violations, &mut rep.max_violation, set_label("connection", &cut.set), cut.violation());
                }
            }
        }
    }
    Ok(rep)
}
