//! Continuous relaxation of a model solved with the dense LP solver.

use crate::error::{OmtError, Result};
use crate::lp::{solve_lp, LpProblem, LpResult, LpStatus, RowSense, Sense};

use super::model::{ConSense, MilpModel};

/// The model as an LP (integrality dropped). Lazy row families are not
/// part of the explicit rows and are therefore absent.
pub fn to_lp(model: &MilpModel) -> LpProblem {
    let nv = model.num_vars();
    let mut lp = LpProblem::new(Sense::Minimize, nv);
    for (k, v) in model.variables.iter().enumerate() {
        lp.lower[k] = v.lower;
        lp.upper[k] = v.upper;
    }
    for &(k, c) in &model.objective {
        lp.objective[k] += c;
    }
    for row in &model.constraints {
        let sense = match row.sense {
            ConSense::Le => RowSense::Le,
            ConSense::Ge => RowSense::Ge,
            ConSense::Eq => RowSense::Eq,
        };
        lp.add_row(row.terms.clone(), sense, row.rhs);
    }
    lp
}

/// Optimal value of the continuous relaxation. Models with lazy rows are
/// rejected, since their explicit rows do not describe the relaxation.
pub fn solve_relaxation(model: &MilpModel) -> Result<LpResult> {
    if let Some(lazy) = model.lazy {
        return Err(OmtError::Unsupported(format!("relaxation of a model with lazy {lazy:?} rows")));
    }
    let r = solve_lp(&to_lp(model))?;
    match r.status {
        LpStatus::Optimal => Ok(r),
        s => Err(OmtError::Lp(format!("relaxation of {} ended {s:?}", model.name))),
    }
}
