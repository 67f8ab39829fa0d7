//! Content-aware graph simplification and community detection.
//!
//! The pipeline builds content edges from each vertex's most similar term
//! vectors, unions them with the topological edges, keeps the
//! `ceil(sqrt(deg))` best-scoring edges around every vertex, and hands the
//! resulting backbone to a content-agnostic clusterer. [`eval`] scores the
//! outcome against (possibly overlapping) ground truth.

pub mod cluster;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod graph;
pub mod manifest;
pub mod sampler;
pub mod seed;
pub mod similarity;
pub mod synth;
pub mod text;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeSet, Graph, VertexId, VertexSet};
