use thiserror::Error;

/// Errors raised by the library. Variants map to CLI exit codes:
/// [`OmtError::Infeasible`] and failed checks exit with 1.
#[derive(Debug, Error)]
pub enum OmtError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("infeasible solution: {0}")]
    Infeasible(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("enumeration budget exceeded: {subsets} subsets > budget {budget}; use a heuristic method instead")]
    BudgetExceeded { subsets: u128, budget: u128 },
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("lp solver: {0}")]
    Lp(String),
    #[error("lp text parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing value for variable `{0}`")]
    MissingValue(String),
    #[error("fixing conflict at l={l}, h={h}: cell fixed both to 0 and to 1")]
    FixingConflict { l: usize, h: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, OmtError>;
