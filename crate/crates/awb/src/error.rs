//! Error types shared across the crate.

use thiserror::Error;

/// A caller handed us inconsistent data: bad indices, mismatched boundary
/// types, unknown names. These are contract violations, not analysis results.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InputError {
    #[error("action set `{name}`: {reason}")]
    BadActionSet { name: String, reason: String },

    #[error("split {split} exceeds boundary count {arity}")]
    BadSplit { split: usize, arity: usize },

    #[error("boundary index {index} out of range (arity {arity})")]
    BoundaryOutOfRange { index: usize, arity: usize },

    #[error("unknown state `{name}`")]
    UnknownState { name: String },

    #[error("state index {index} out of range ({count} states)")]
    StateOutOfRange { index: usize, count: usize },

    #[error("glued boundaries have different types: `{left}` vs `{right}`")]
    GluedTypeMismatch { left: String, right: String },

    #[error("boundary signatures differ: {left} vs {right}")]
    SignatureMismatch { left: String, right: String },

    #[error("automaton has no two-boundary presentation (no split)")]
    MissingSplit,

    #[error("automaton `{name}` has no initial state")]
    MissingInitial { name: String },

    #[error("invalid behaviour: {reason}")]
    BadBehaviour { reason: String },

    #[error("{context}: {reason}")]
    Invalid { context: String, reason: String },
}

impl InputError {
    pub fn invalid(context: impl Into<String>, reason: impl Into<String>) -> Self {
        InputError::Invalid {
            context: context.into(),
            reason: reason.into(),
        }
    }
}
