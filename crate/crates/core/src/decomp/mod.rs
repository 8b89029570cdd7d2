//! Low-diameter decompositions and their hierarchies.

mod ball_growth;
mod clustering;
mod hierarchy;
mod refine;
mod shift;

pub use ball_growth::{ball_growth_profile, BallGrowthProfile};
pub use clustering::Clustering;
pub use hierarchy::{build_hierarchy, build_level, center_dist_cap, Hierarchy, ROOT};
pub(crate) use hierarchy::decompose_capped;
pub use refine::{refine, refine_with, RefinedHierarchy};
pub use shift::{
    approx_random_shift_decompose, blur, blur_radius_bound, blur_rounds, decompose, default_eps,
    random_shift_decompose, Mode,
};
