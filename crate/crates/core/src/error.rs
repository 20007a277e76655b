use crate::{Elem, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("symbol `{0}` is reserved")]
    ReservedSymbol(String),
    #[error("symbol `{0}` must have positive arity")]
    ZeroArity(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("tuple of length {got} for symbol `{symbol}` of arity {arity}")]
    ArityMismatch {
        symbol: String,
        arity: usize,
        got: usize,
    },
    #[error("element {0} is not in the universe")]
    ElementOutside(Elem),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("not a graph: {0}")]
    NotAGraph(String),
    #[error("format error: {0}")]
    Format(String),
}
