//! Factored l1-oblivious routing over independent decomposition copies.

mod flow;
mod operator;
mod paths;
mod pvalues;
mod verify;

pub use flow::{Demand, Flow, BALANCE_TOL};
pub use operator::{
    build_routing_operator, copy_count, LevelCopy, LogBase, RoutingConfig, RoutingLevel,
    RoutingOperator, SegmentStore, SparseColumns, FORMAT_VERSION, PRUNE_TOL,
};
pub use paths::{ceil_lg, decompose_range, dyadic_ranges, PathCollection, Segment};
pub use pvalues::{compute_p_values, PValues};
pub use verify::*;
