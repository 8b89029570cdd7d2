//! Compare routed cost with the exact transshipment optimum on a small graph.
//!
//! ```bash
//! cargo run --release --example transshipment_oracle
//! ```

use metric_embed::harness::{generate_graph, opt_transshipment, random_demand, GraphSpec};
use metric_embed::rng::Purpose;
use metric_embed::routing::{build_routing_operator, verify_competitive_ratio, RoutingConfig};
use metric_embed::Substreams;

fn main() -> metric_embed::Result<()> {
    let streams = Substreams::new(4);
    let spec: GraphSpec = "er:12:0.3:w5".parse()?;
    let graph = generate_graph(&spec, &mut streams.stream(Purpose::Generator, 0, 0))?;
    let op = build_routing_operator(&graph, RoutingConfig::default(), &streams)?;
    let edge_max = verify_competitive_ratio(&op, &graph, None)?.max_ratio;

    let mut rng = streams.stream(Purpose::Demand, 0, 0);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let d = random_demand(graph.n(), &mut rng);
        let routed = op.apply(&d)?.cost(&graph);
        let opt = opt_transshipment(&graph, &d)?;
        worst = worst.max(routed / opt);
        if i < 5 {
            println!("demand {i}: routed {routed:.3}, optimum {opt:.3}, ratio {:.3}", routed / opt);
        }
    }
    println!("worst of 20 demands: {worst:.3}; single-edge maximum: {edge_max:.3}");
    Ok(())
}
