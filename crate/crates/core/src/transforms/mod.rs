//! Derivatives, depth reduction, and lowering to formulas and programs.

pub mod depth;
pub mod derivative;
pub mod lower;

pub use depth::{ceil_log2, depth_bound, depth_reduce, StageLedger, StageRecord};
pub use derivative::{
    check_derivative_expansion, check_frontier_expansion, gate_frontier, partial_derivative,
    GateFrontier,
};
pub use lower::{circuit_to_abp, circuit_to_formula, formula_size, formula_to_abp, LoweringReport};
