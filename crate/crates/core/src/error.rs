//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while reading an automaton file.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("state `{state}` does not permute the letters")]
    NonBijectiveOutput { state: String },
    #[error("unknown state `{name}`")]
    UnknownState { name: String },
    #[error("missing `identity:` declaration")]
    MissingIdentity,
    #[error("state `{name}` declared twice")]
    DuplicateState { name: String },
    #[error("identity state `{name}` must fix every letter with identity sections")]
    BadIdentity { name: String },
}

/// A resource limit was hit before an answer could be certified. This is a
/// statement about the budget, never a mathematical verdict.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("budget exceeded in {context}: {detail}")]
pub struct BudgetExceeded {
    pub context: &'static str,
    pub detail: String,
}

/// Errors from algebra operations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("germ base does not lie in the source of the arrow")]
    IncompatibleBase,
    #[error("the support of the element escapes the given cover")]
    CoverInsufficient,
    #[error("internal verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}
