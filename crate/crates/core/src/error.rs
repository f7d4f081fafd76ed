use thiserror::Error;

/// Errors surfaced by the solvers, mesh builders and experiment runners.
#[derive(Debug, Error)]
pub enum SteklovError {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scenario or mesh description is internally inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// A computation would exceed a configured budget.
    #[error("resource error: {0}")]
    Resource(String),

    /// A numerical evaluation failed (non-finite coefficient, SPD violation, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SteklovError>;
