use oimso_core::{CoreError, Elem};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` has arity {expected}, used with {got} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("counting is only supported over set variables and unary symbols, not `{0}`")]
    CountingArity(String),
    #[error("variable `{0}` is not bound by the assignment")]
    Unbound(String),
    #[error("formula uses the order symbol but no order was given")]
    MissingOrder,
    #[error("not a linear order of the universe: {0}")]
    NotAnOrder(String),
    #[error("element {0} is outside the universe")]
    ElementOutside(Elem),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}
