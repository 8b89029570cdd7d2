//! The deterministic ball-growing sequence around each vertex of a weighted
//! random graph.
//!
//! ```bash
//! cargo run --example ball_growth
//! ```

use metric_embed::decomp::ball_growth_profile;
use metric_embed::harness::{generate_graph, GraphSpec};
use metric_embed::rng::Purpose;
use metric_embed::Substreams;

fn main() -> metric_embed::Result<()> {
    let spec: GraphSpec = "er:64:0.1:w16".parse()?;
    let graph = generate_graph(&spec, &mut Substreams::new(5).stream(Purpose::Generator, 0, 0))?;
    let ln = (graph.n() as f64).ln();
    let top = graph.level_count();

    let p = ball_growth_profile(&graph, 0)?;
    println!("vertex 1, L = {top}");
    println!("{:>5} {:>6} {:>10}", "level", "delta", "r");
    for l in 0..=top {
        println!("{l:>5} {:>6} {:>10}", p.delta[l], p.r[l]);
    }

    let profiles = (0..graph.n()).map(|v| ball_growth_profile(&graph, v)).collect::<Result<Vec<_>, _>>()?;
    let max_delta = profiles.iter().map(|p| p.delta_sum()).max().unwrap_or(0);
    let max_r = profiles.iter().map(|p| p.r_sum()).fold(0.0, f64::max);
    println!("\nover all {} vertices:", graph.n());
    println!("  max sum delta = {max_delta} (2 ln n = {:.2})", 2.0 * ln);
    println!("  max sum r     = {max_r} (4 ln n + 4L + 2 = {:.2})", 4.0 * ln + 4.0 * top as f64 + 2.0);
    println!("  recurrence exact everywhere: {}", profiles.iter().all(|p| p.recurrence_holds()));
    Ok(())
}
