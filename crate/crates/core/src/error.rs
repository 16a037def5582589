use thiserror::Error;

/// Crate-wide error type. Every failure mode that a caller can react to
/// gets its own variant; budget and precision failures carry enough data
/// to decide whether to retry with different settings.
#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration budget exceeded: examined {examined} of allowed {budget} candidates")]
    BudgetExceeded { examined: u64, budget: u64 },

    #[error("insufficient levels: requested width {requested}, best achievable {achievable}")]
    InsufficientLevels { requested: String, achievable: String },

    #[error("empty height range: no nonzero integer vector has norm at most {cap}")]
    EmptyHeightRange { cap: String },

    #[error("cannot certify comparison after {refinements} refinements: {context}")]
    PrecisionExhausted { refinements: u32, context: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("no exponent pair within bound {bound} reaches the target within {eps}")]
    NoPairWithinBound { bound: u64, eps: String },

    #[error("level budget exceeded: next integer would need {bits} bits (cap {cap})")]
    LevelBudgetExceeded { bits: u64, cap: u64 },

    #[error("mismatched provenance: {0}")]
    MismatchedProvenance(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Other(String),
}

impl Error {
    /// Process exit code for the CLI: usage errors are handled by clap (2),
    /// budget exhaustion is 3, certified invariant violations are 4.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } | Error::LevelBudgetExceeded { .. } => 3,
            Error::InvariantViolation(_) => 4,
            _ => 1,
        }
    }
}
