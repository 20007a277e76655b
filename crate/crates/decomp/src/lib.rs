//! Clique-separator decompositions of graphs, segmentation of tree
//! decompositions, improved graphs, 3-connected splitting and small exact
//! oracles for treewidth and minors.

mod atoms;
mod error;
mod flow;
mod oracles;
mod segment;
mod separability;
mod separators;
mod triconnected;

pub use atoms::{
    atom_decomposition, components_decomposition, decompose_step, maximal_c_atoms, refine,
    AtomDecomposition, Role,
};
pub use error::DecompError;
pub use flow::{disjoint_paths, improve};
pub use oracles::{has_minor, treewidth_exact, MINOR_ORACLE_MAX, TREEWIDTH_ORACLE_MAX};
pub use segment::segment;
pub use separability::{complete_bipartite, separability_check, SeparabilityMode, SeparabilityReport};
pub use separators::{clique_separators, is_atom, is_c_atom, CliqueSeparator};
pub use triconnected::{
    classify_torso, is_k_connected, three_connected_decomposition, TorsoClass,
    TriconnectedDecomposition,
};

pub type Result<T, E = DecompError> = std::result::Result<T, E>;
