use thiserror::Error;

use crate::graph::MAX_VERTICES;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex count must be at least 1")]
    NoVertices,
    #[error("vertex count {0} exceeds the supported maximum of {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("loop edge ({0}, {0})")]
    LoopEdge(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) has an endpoint outside 1..={n}")]
    EndpointOutOfRange { u: usize, v: usize, n: usize },
    #[error("vertex counts differ: {0} vs {1}")]
    MismatchedOrder(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid partition shape {parts:?}: {reason}")]
    InvalidShape { parts: Vec<usize>, reason: String },
    #[error("family members {0} and {1} are identical")]
    DuplicateMember(usize, usize),
    #[error("family member {0} does not belong to universe {1}")]
    NotInUniverse(usize, String),
    #[error("the two graphs are equal; distinguishability needs different copies")]
    EqualGraphs,
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
