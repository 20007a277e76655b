//! Finite relational structures, graphs and rooted tree decompositions.
//!
//! Element ids and tree node ids are opaque `u32`s living in separate id
//! spaces. All values are immutable once built.

mod decomposition;
pub mod dense;
mod error;
mod format;
mod graph;
mod structure;
mod vocab;

pub use decomposition::{
    metrics, node_sets, torso, validate_decomposition, Metrics, NodeKind,
    SegmentedDecomposition, TreeDecomposition, ValidationReport, Violation,
};
pub use error::CoreError;
pub use format::{decomposition_to_dot, parse_edge_list, DecompositionJson};
pub use graph::Graph;
pub use structure::{gaifman, induced, Structure};
pub use vocab::{is_reserved, Symbol, Vocabulary, ORDER_SYMBOL};

/// Element of a structure universe.
pub type Elem = u32;
/// Node of a decomposition tree.
pub type NodeId = u32;

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
