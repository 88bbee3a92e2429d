//! Root-system combinatorics: Cartan data, weights, dominance order, and
//! Weyl characters.

mod character;
mod system;
mod weight;

pub use character::{
    candidate_support, kostant_partition, weyl_character, weyl_character_alternating,
    weyl_dimension, Character,
};
pub use system::{RootSystem, RootSystemSpec};
pub use weight::{dominance_leq, Weight};
