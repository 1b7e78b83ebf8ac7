//! Information measures, strings, types and typical sets.

mod measures;
mod pmf;
mod symbols;
mod typical;

pub use measures::{
    cross_entropy, divergence, divergence_slices, entropy, l1_distance, string_self_information,
    type_log2_prob,
};
pub use pmf::Pmf;
pub use symbols::{SymbolString, TypeVector};
pub use typical::{enumerate_typical, is_typical, is_typical_counts, typical_types};
