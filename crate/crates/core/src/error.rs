use std::fmt;

use thiserror::Error;

/// A syntax error with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub pos: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(pos: usize, message: impl Into<String>) -> Self {
        SyntaxError { pos, message: message.into() }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed structure document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("node id {0:?} is not in the domain")]
    UndeclaredId(String),
    #[error("duplicate domain entry {0:?}")]
    DuplicateId(String),
    #[error("node ids must be non-empty strings")]
    EmptyId,
    #[error("structures must have a non-empty domain")]
    EmptyDomain,
    #[error("name {0:?} is used both as a unary and as a binary predicate")]
    ArityClash(String),
    #[error("restriction to {0:?} would produce an empty structure")]
    EmptyRestriction(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("variable {0} is free but unassigned")]
    UnboundVariable(char),
    #[error("search budget exceeded: {0}")]
    Budget(String),
    #[error("self-check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
