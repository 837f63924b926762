use thiserror::Error;

use crate::types::{NodeId, SupernodeId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SummaryError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown supernode {0}")]
    UnknownSupernode(SupernodeId),
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),
    #[error("unsound stream: edge {{{0}, {1}}} inserted while already present")]
    DuplicateInsert(NodeId, NodeId),
    #[error("unsound stream: edge {{{0}, {1}}} deleted while absent")]
    MissingDelete(NodeId, NodeId),
    #[error("node {0} has no neighbors")]
    NoNeighbors(NodeId),
    #[error("integrity violation: {0}")]
    Integrity(String),
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("snapshot is inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
