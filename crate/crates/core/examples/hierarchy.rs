//! A full hierarchy, its nested refinement, and the center-distance sum of
//! one vertex.
//!
//! ```bash
//! cargo run --example hierarchy
//! ```

use metric_embed::decomp::{build_hierarchy, refine, Mode};
use metric_embed::harness::{estimate_center_sum, generate_graph, GraphSpec};
use metric_embed::rng::Purpose;
use metric_embed::Substreams;

fn main() -> metric_embed::Result<()> {
    let streams = Substreams::new(3);
    let graph = generate_graph(&GraphSpec::grid(6, 6), &mut streams.stream(Purpose::Generator, 0, 0))?;
    let h = build_hierarchy(&graph, Mode::Exact, &streams, 0)?;
    let r = refine(&h, &graph);

    println!("L = {}", h.top());
    println!("{:>5} {:>10} {:>10} {:>14}", "level", "clusters", "refined", "max centerDist");
    for (l, c) in h.levels.iter().enumerate() {
        let worst = c.center_dist.iter().copied().fold(0.0, f64::max);
        println!("{l:>5} {:>10} {:>10} {worst:>14}", c.cluster_count(), r.cluster_count(l));
    }

    let v = 14;
    let est = estimate_center_sum(&graph, v, 500, Mode::Exact, &streams)?;
    println!(
        "\nsum_l centerDist_l(v)/2^l for v = {}: mean {:.3} +- {:.3} over {} hierarchies (16 ln n = {:.1})",
        v + 1,
        est.mean,
        est.band,
        est.trials,
        16.0 * (graph.n() as f64).ln()
    );
    Ok(())
}
