//! Crate-wide error type.

/// Errors produced by max-plus algebra, model validation, and estimation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Matrix shapes are incompatible with the requested operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A value lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Text or JSON input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// A model specification violates its invariants.
    #[error("invalid model: {0}")]
    InvalidModel(String),
    /// The requested method cannot handle this model.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    /// Exact enumeration would visit more joint outcomes than allowed.
    #[error("enumeration budget exceeded: {count} joint outcomes > cap {cap}")]
    BudgetExceeded { count: u128, cap: u64 },
    /// A caller-facing precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// No stored reference constant exists for the requested quantity.
    #[error("fixture unavailable: {0}")]
    FixtureUnavailable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
