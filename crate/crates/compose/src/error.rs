use oimso_core::{CoreError, NodeId};
use oimso_decomp::DecompError;
use oimso_logic::LogicError;
use oimso_otxx::OtxxError;
use oimso_types::{TypeError, TypeId};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("node {node} is not a{} node", if *.expected_a { "n a" } else { " b" })]
    KindMismatch { node: NodeId, expected_a: bool },
    #[error("no representative stored for type {0}")]
    MissingRepresentative(TypeId),
    #[error(transparent)]
    Otxx(OtxxError),
    #[error(transparent)]
    Types(TypeError),
    #[error(transparent)]
    Decomp(DecompError),
    #[error(transparent)]
    Logic(LogicError),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl ComposeError {
    pub fn is_capacity(&self) -> bool {
        matches!(self, ComposeError::Capacity(_))
    }
}

// Capacity errors of the lower layers are normalized so that callers only
// need to match one variant.
impl From<OtxxError> for ComposeError {
    fn from(e: OtxxError) -> Self {
        match e {
            OtxxError::Capacity(m) => ComposeError::Capacity(m),
            e => ComposeError::Otxx(e),
        }
    }
}

impl From<TypeError> for ComposeError {
    fn from(e: TypeError) -> Self {
        match e {
            TypeError::Capacity(m) => ComposeError::Capacity(m),
            e => ComposeError::Types(e),
        }
    }
}

impl From<DecompError> for ComposeError {
    fn from(e: DecompError) -> Self {
        match e {
            DecompError::Capacity(m) => ComposeError::Capacity(m),
            e => ComposeError::Decomp(e),
        }
    }
}

impl From<LogicError> for ComposeError {
    fn from(e: LogicError) -> Self {
        match e {
            LogicError::Capacity(m) => ComposeError::Capacity(m),
            e => ComposeError::Logic(e),
        }
    }
}
