use oimso_core::CoreError;
use oimso_logic::LogicError;
use thiserror::Error;

use crate::TypeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("type {0} has no stored realization")]
    Unregistered(TypeId),
    #[error("unknown type id {0}")]
    Unknown(TypeId),
    #[error("formula does not fit the type: {0}")]
    Mismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("malformed registry: {0}")]
    Json(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Core(#[from] CoreError),
}
