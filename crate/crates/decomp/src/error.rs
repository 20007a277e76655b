use oimso_core::{CoreError, Elem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecompError {
    /// A precondition on the input shape does not hold.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Elem),
    #[error("treewidth {tw} exceeds the bound {k}")]
    Treewidth { tw: usize, k: usize },
    #[error(transparent)]
    Core(#[from] CoreError),
}
