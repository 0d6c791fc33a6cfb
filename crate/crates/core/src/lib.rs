//! Ordered Median Tree location (OMT): open `p` facilities, allocate every
//! client to one of them, and connect the facilities by a spanning tree,
//! minimising the λ-weighted average of the sorted allocation costs plus
//! the average tree-edge cost.
//!
//! Node ids are 0-based in the library and 1-based in all file I/O.

pub mod covering;
pub mod benders;
pub mod cuts;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod formulations;
pub mod gap;
pub mod graph;
pub mod heuristics;
pub mod instance;
pub mod lp;
pub mod objective;
pub mod oracle;
pub mod preprocessing;
pub mod subsets;

pub use error::{OmtError, Result};
pub use exec::Exec;
pub use instance::{build_lambda, generate_instance, Criterion, Instance, Solution};
pub use objective::evaluate_objective;
