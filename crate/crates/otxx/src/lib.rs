//! Expanded ordered tree extensions (otxx): a structure merged with a
//! segmented tree decomposition and per-bag orders, plus the derived
//! relations, the canonical partial order, compatible linear orders,
//! sub-otxxs and replacement.

mod build;
mod coloring;
mod error;
mod json;
mod orders;
#[allow(clippy::module_inception)]
mod otxx;
mod sub;

pub use build::{build_otxx, decode_structure, validate_otxx, validate_sub_otxx};
pub use coloring::{coloring_bag_orders, proper_coloring, BagOrderProvider};
pub use error::OtxxError;
pub use json::{DerivedJson, OtxxJson};
pub use orders::{
    block_order, child_sequences, compatible_orders, is_compatible, normalize,
    random_compatible_order, OrderMode, DEFAULT_EXTENSION_CAP,
};
pub use otxx::{expanded_vocabulary, Item, Otxx};
pub use sub::{local_structure, replace, sub_otxx, Interface, Replaced};

pub type Result<T, E = OtxxError> = std::result::Result<T, E>;
