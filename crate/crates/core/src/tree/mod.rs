//! Probabilistic tree embeddings built from refined hierarchies.

mod embed;
mod lca;
mod stretch;

pub use embed::{build_tree, build_tree_with, sample_tree, tree_distance, TreeEmbedding, TreeNode};
pub use lca::Lca;
pub use stretch::{stretch_stats, StretchReport, ALL_PAIRS_MAX_N};
