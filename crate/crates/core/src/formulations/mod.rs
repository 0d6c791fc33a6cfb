//! MILP formulations as an explicit model IR: building, dimension
//! formulas, lifting of combinatorial solutions, feasibility checks, LP
//! text round-tripping, continuous relaxations and subtour separation.

mod build;
mod check;
mod lift;
mod lp_format;
mod model;
mod relax;
mod separation;
mod size;

pub use build::{build_for_instance, build_model, model_name, BuildOptions, ModelInput};
pub use check::{check_assignment, CheckReport, RowViolation, CHECK_TOL};
pub use lift::{lift_raw, lift_solution};
pub use lp_format::{export_lp, fmt_num, parse_lp};
pub use model::{
    dense_values, Assignment, Block, ConSense, Constraint, Family, LazyFamily, MilpModel, Sorting, Symbol, TreeKind,
    VarType, Variable,
};
pub use relax::{solve_relaxation, to_lp};
pub use separation::{separate_subtour, subtour_lhs, SubtourCut};
pub use size::predicted_size;

pub(crate) use model::u_name;
