use crate::digraph::Vertex;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("arc ({0}, {1}) is not present")]
    MissingArc(Vertex, Vertex),
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("arc ({0}, {1}) already present")]
    DuplicateArc(Vertex, Vertex),
    #[error("vertex {0} already exists")]
    VertexExists(Vertex),
    #[error("separator may not contain the root or the target vertex {0}")]
    InvalidSeparator(Vertex),
    #[error("instance has {actual} vertices, bound is {bound}")]
    TooLarge { actual: usize, bound: usize },
    #[error("parameter k must be at least 1")]
    ZeroParameter,
    #[error("parameters differ across composed instances ({0} vs {1})")]
    ParameterMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("invalid set cover instance: {0}")]
    InvalidSetCover(String),
    #[error("invalid willow: {0}")]
    InvalidWillow(String),
    #[error("leaf budget {budget} exceeds maximum {max}")]
    BudgetExceedsMax { budget: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
