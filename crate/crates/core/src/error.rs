//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A count exceeded the machine-word range. Counts are checked, never wrapped.
    #[error("count overflow on state `{state}`")]
    CountOverflow { state: String },

    /// A state identifier was declared twice in a state set.
    #[error("duplicate state `{state}`")]
    DuplicateState { state: String },

    /// A state identifier is not part of the expected state set.
    #[error("unknown state `{state}`")]
    UnknownState { state: String },

    /// Two identical transitions in one net.
    #[error("duplicate transition `{transition}`")]
    DuplicateTransition { transition: String },

    /// A transition index does not exist in the net.
    #[error("transition index {index} out of range (net has {len} transitions)")]
    BadTransitionIndex { index: usize, len: usize },

    /// An edge index does not exist in the control graph.
    #[error("edge index {index} out of range (graph has {len} edges)")]
    BadEdgeIndex { index: usize, len: usize },

    /// An exploration budget must allow at least one configuration.
    #[error("exploration budget must be at least 1")]
    ZeroBudget,

    /// A search did not complete within its budget.
    #[error("exploration budget exhausted: {context}")]
    BudgetExhausted { context: String },

    /// A caller-supplied precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A constructed witness failed its postcondition re-check.
    #[error("witness check failed: {}", violations.join("; "))]
    WitnessCheckFailed { violations: Vec<String> },

    /// An argument is outside the mathematical domain of the operation.
    #[error("domain violation: {0}")]
    Domain(String),

    /// A bound formula evaluates to a number too large to materialize.
    #[error("bound value too large to materialize: {0}")]
    BoundTooLarge(String),

    /// Internal invariant broken; indicates a bug or an unsatisfiable input.
    #[error("internal failure: {0}")]
    Internal(String),

    /// Textual input could not be parsed. Positions are 1-based.
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
