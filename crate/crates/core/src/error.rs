use thiserror::Error;

use crate::relcore::Elem;

/// Reasons a relation fails to be central.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("not totally reflexive: missing tuple {0:?}")]
    NotReflexive(Vec<Elem>),
    #[error(
        "not totally symmetric: {member:?} is a member but its permutation {missing:?} is not"
    )]
    NotSymmetric {
        member: Vec<Elem>,
        missing: Vec<Elem>,
    },
    #[error("center is empty")]
    EmptyCenter,
    #[error("center is the whole domain (relation is trivial)")]
    ImproperCenter,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("domain mismatch: k={left} vs k={right}")]
    DomainMismatch { left: usize, right: usize },
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
