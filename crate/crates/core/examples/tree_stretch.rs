//! Sample tree embeddings of a grid and measure their stretch.
//!
//! ```bash
//! cargo run --release --example tree_stretch -- [ROWS] [COLS] [TREES]
//! ```

use std::env;

use metric_embed::decomp::Mode;
use metric_embed::harness::{generate_graph, GraphSpec};
use metric_embed::rng::Purpose;
use metric_embed::sssp::DistanceCache;
use metric_embed::tree::{sample_tree, stretch_stats};
use metric_embed::Substreams;

fn main() -> metric_embed::Result<()> {
    let args: Vec<usize> = env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let (rows, cols) = (args.first().copied().unwrap_or(8), args.get(1).copied().unwrap_or(8));
    let trees = args.get(2).copied().unwrap_or(200) as u64;

    let streams = Substreams::new(1);
    let graph = generate_graph(&GraphSpec::grid(rows, cols), &mut streams.stream(Purpose::Generator, 0, 0))?;
    let mut cache = DistanceCache::new(&graph);
    let tree = sample_tree(&graph, Mode::Exact, &streams, 0, &mut cache)?;
    let (a, b) = (0, graph.n() - 1);
    println!(
        "one tree: {} nodes; corners {} and {}: dist_G = {}, dist_T = {}",
        tree.node_count(),
        a + 1,
        b + 1,
        cache.dist(a, b),
        tree.distance(a, b)?
    );

    for mode in [Mode::Exact, Mode::approximate()] {
        let r = stretch_stats(&graph, trees, mode, &streams)?;
        println!(
            "{:>6}: {} trees, {} pairs, max mean stretch {:.2} (= {:.2} ln n), average {:.2}, dominance violations {}",
            mode.name(),
            r.trials,
            r.pairs,
            r.max_mean_stretch,
            r.measured_constant(),
            r.avg_mean_stretch,
            r.dominance_violations
        );
    }
    Ok(())
}
