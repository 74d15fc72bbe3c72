use thiserror::Error;

/// Reason an operation could not decide a sign at the current precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Undecided {
    /// A linear form `p - q·x` could not be separated from zero.
    Independence { q: Vec<i64>, p: i64 },
    /// Some other interval quantity was too wide.
    Precision(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision of {bits} bits is below the 64-bit minimum")]
    PrecisionTooLow { bits: u32 },

    /// `q·x = p` holds exactly (or could not be excluded after every escalation).
    #[error("{{1, x}} is dependent over Z: q = {q:?} gives q·x = {p}{}", if *.exact { " exactly" } else { " (not separable from zero after escalation)" })]
    IndependenceViolation { q: Vec<i64>, p: i64, exact: bool },

    #[error("precision exhausted at {bits} bits: {what}")]
    PrecisionExhausted { what: String, bits: u32 },

    #[error("elimination could not certify a pivot at {bits} bits")]
    SingularSystem { bits: u32 },

    #[error("Liouville exponent a_{k} needs {needed_bits} bits, budget is {budget_bits}")]
    TowerOverflow { k: usize, needed_bits: u64, budget_bits: u64 },

    #[error("problem size {size} exceeds budget {budget} (use --force-budget to override)")]
    BudgetExceeded { size: usize, budget: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Internal: retried by [`crate::numerics::with_escalation`] at higher precision.
    #[error("undecided at {bits} bits: {reason:?}")]
    Indeterminate { reason: Undecided, bits: u32 },
}

impl Error {
    pub(crate) fn undecided_independence(q: Vec<i64>, p: i64, bits: u32) -> Self {
        Error::Indeterminate { reason: Undecided::Independence { q, p }, bits }
    }

    pub(crate) fn undecided(what: impl Into<String>, bits: u32) -> Self {
        Error::Indeterminate { reason: Undecided::Precision(what.into()), bits }
    }

    /// Converts an exhausted indeterminate result into its definitive error.
    pub(crate) fn settle(self) -> Self {
        match self {
            Error::Indeterminate { reason: Undecided::Independence { q, p }, .. } => {
                Error::IndependenceViolation { q, p, exact: false }
            }
            Error::Indeterminate { reason: Undecided::Precision(what), bits } => {
                Error::PrecisionExhausted { what, bits }
            }
            other => other,
        }
    }

    pub fn is_indeterminate(&self) -> bool {
        matches!(self, Error::Indeterminate { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
