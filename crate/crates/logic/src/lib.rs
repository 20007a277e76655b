//! Formulas of monadic second-order logic with modulo counting, a text
//! syntax, and brute-force semantics over finite structures.

mod ast;
mod error;
mod eval;
pub mod gen;
mod invariance;
mod parser;

pub use ast::{Arg, CountTarget, Formula, Var};
pub use error::LogicError;
pub use eval::{evaluate, Assignment};
pub use invariance::{check_order_invariance, Invariance, DEFAULT_ORDER_CAP};
pub use parser::parse_formula;

pub type Result<T, E = LogicError> = std::result::Result<T, E>;
