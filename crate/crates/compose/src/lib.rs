//! Type composition over expanded ordered tree extensions.
//!
//! Types are composed semantically: the children of a node are replaced by
//! stored realizations of their types and the shrunken structure is typed
//! directly. Child types name their interface, which makes gluing sound at
//! the same rank.

mod composer;
mod error;
mod lift;
mod oi;

pub use composer::{ComposeConfig, ComposeStats, Composer, DpResult, NodeResult, Rep, Role, TypePartition, View};
pub use error::ComposeError;
pub use lift::{lift_modelcheck, lift_otxx, InvarianceStatus, LiftOptions, LiftOutcome, OrderChoice, Trace, TraceNode};
pub use oi::{
    cover_of, small_otxxs, CoClasses, CompatibleCover, OiSet, DEFAULT_ORDERING_CAP, DEFAULT_REFINEMENT_CAP,
};

pub type Result<T, E = ComposeError> = std::result::Result<T, E>;
