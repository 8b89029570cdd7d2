//! Generators, estimators, oracles and experiment reports.

mod estimators;
mod experiment;
mod generators;
mod oracle;

pub use estimators::{
    binomial_band, estimate_center_sum, estimate_clustered, estimate_separation, ClusteredEstimate,
    MeanEstimate, SeparationEstimate,
};
pub use experiment::{
    conservation_and_adjoint, random_demand, run_experiment, write_report, Constants, Criterion,
    ExperimentConfig, ExperimentKind, GraphInfo, GraphSource, Report,
};
pub use generators::{generate_graph, GraphSpec, GENERATOR_RETRIES};
pub use oracle::{floyd_warshall, opt_transshipment, transshipment_lower_bound, OPT_MAX_N};
