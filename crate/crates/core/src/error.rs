use thiserror::Error;

/// Errors shared across the library.
///
/// `Domain` covers evaluation outside a nonlinearity's trusted range,
/// `Validation` covers malformed inputs (grids, initial data, configs),
/// `Precondition` covers mathematical preconditions of an operation
/// (e.g. asking for a semi-wave outside the admissible resistance range),
/// `Numerical` covers solver breakdowns, and `Inconclusive` covers
/// searches that exhausted their budget without a verdict.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
