//! Proof-tree types of set-multilinear circuits.
//!
//! A proof tree keeps one child of every sum and both children of every
//! product and computes one monomial. Its type records only the index sets
//! of its product and input gates; constants are absorbed. Truncating a
//! type at degree `d` removes every node over at most `d/3` buckets.

mod decompose;
mod property_u;
mod types;

pub use decompose::{
    check_slice_partition, component_sizes, decompose_by_type, frontier_index_sets,
    slice_by_index_set, unique_type_to_formula, SliceCheck,
};
pub use property_u::{check_property_u, PropertyUReport};
pub use types::{deleted, enumerate_tree_types, TreeType};
