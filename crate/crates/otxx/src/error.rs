use oimso_core::{CoreError, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OtxxError {
    /// A precondition of the operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    /// The input does not describe a valid (sub-)otxx.
    #[error("invalid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}
