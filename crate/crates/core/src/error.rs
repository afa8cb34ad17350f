use thiserror::Error;

use crate::subset::Subset;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} is {got}, limit {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    /// The graph has a chordless cycle of length at least four.
    #[error("graph is not triangulated; chordless cycle {cycle:?}")]
    NotTriangulated { cycle: Vec<usize> },

    #[error("negative value {value} at subset {subset}")]
    NegativeValue { subset: Subset, value: f64 },

    #[error("parse error at {field}: {message}")]
    Parse { field: String, message: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
