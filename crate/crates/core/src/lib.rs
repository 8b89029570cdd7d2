//! Random-shift low-diameter decompositions, probabilistic tree embeddings
//! and factored l1-oblivious routing operators.

pub mod decomp;
pub mod error;
pub mod graph;
pub mod harness;
pub mod rng;
pub mod routing;
pub mod sssp;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{parse_graph, parse_graph_str, GraphFormat, Vertex, WeightedGraph};
pub use rng::Substreams;
