#![allow(dead_code)]

use metric_embed::harness::{generate_graph, GraphSpec};
use metric_embed::rng::Purpose;
use metric_embed::{Substreams, WeightedGraph};

/// Generates `spec` (e.g. `"er:32:0.15:w8"`) from its own seed.
pub fn gen(spec: &str, seed: u64) -> WeightedGraph {
    let spec: GraphSpec = spec.parse().expect("valid generator spec");
    let mut rng = Substreams::new(seed).stream(Purpose::Generator, 0, 0);
    generate_graph(&spec, &mut rng).expect("generator succeeds")
}

pub fn unit_path(k: usize) -> WeightedGraph {
    WeightedGraph::from_edges(k, (1..k).map(|x| (x - 1, x, 1.0))).unwrap()
}

pub fn k2() -> WeightedGraph {
    WeightedGraph::from_edges(2, [(0, 1, 1.0)]).unwrap()
}

/// A random recursive tree: vertex `x > 0` hangs below a uniform earlier vertex.
pub fn random_tree_parents(n: usize, seed: u64) -> Vec<Option<usize>> {
    use rand::Rng;
    let mut rng = Substreams::new(seed).stream(Purpose::Generator, 1, 0);
    (0..n).map(|x| (x > 0).then(|| rng.gen_range(0..x))).collect()
}
