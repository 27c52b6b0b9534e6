use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants map onto CLI exit codes: [`Error::Hypothesis`] and
/// [`Error::KTooSmall`] are "hypothesis not met", the budget variants are
/// resource refusals, everything else is a usage problem.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid radicand {0}: must be a positive integer")]
    InvalidRadicand(String),
    #[error("radicand mismatch: {0} vs {1}")]
    RadicandMismatch(String, String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("k = {k} is too small (need k >= {min})")]
    KTooSmall { k: u64, min: u64 },
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("comparison indeterminate at {bits} bits: {what}")]
    Indeterminate { what: String, bits: u32 },
    #[error("enumeration budget exceeded: estimate {estimate} > cap {cap}")]
    BudgetExceeded { estimate: u128, cap: u128 },
    #[error("memory budget exceeded: estimate {estimate} bytes > budget {budget} bytes")]
    MemoryBudget { estimate: u128, budget: u128 },
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("closed form degenerate: {0}")]
    Degenerate(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
