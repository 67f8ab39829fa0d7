use std::io;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {vertex} out of range (vertex count {vertex_count})")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },

    #[error("non-positive edge weight {weight} on edge ({u}, {v})")]
    NonPositiveWeight { u: usize, v: usize, weight: f64 },

    #[error("graph has {vertex_count} vertices, above the spectrum cap of {cap}")]
    GraphTooLarge { vertex_count: usize, cap: usize },

    #[error("requested {requested} eigenvalues from a graph with {vertex_count} vertices")]
    TooManyEigenvalues {
        requested: usize,
        vertex_count: usize,
    },

    #[error("cannot build a signature for an empty input")]
    EmptySignatureInput,

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty cluster passed to F-score")]
    EmptyCluster,

    #[error("predicted clustering is not a partition: {0}")]
    NotAPartition(String),

    #[error("partition file has {actual} lines, expected {expected}")]
    PartitionLineCount { expected: usize, actual: usize },

    #[error("bad snapshot: {0}")]
    Snapshot(String),

    #[error("external partitioner failed: {0}")]
    External(String),

    #[error("unknown clustering backend `{0}`")]
    UnknownBackend(String),
}

pub type Result<T> = std::result::Result<T, Error>;
