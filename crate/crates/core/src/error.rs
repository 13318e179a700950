use thiserror::Error;

/// Errors produced by the simulator and the analysis tools.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A candidate matrix whose nonzero pattern disagrees with the target.
    #[error("pattern mismatch at {} entries", counterexamples.len())]
    PatternMismatch { counterexamples: Vec<(usize, usize)> },

    #[error("randomized procedure failed after {attempts} attempts")]
    ProbabilisticFailure { attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
