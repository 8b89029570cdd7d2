//! Rebuild a routing operator until it meets a competitive-ratio threshold,
//! then store it and load it back.
//!
//! ```bash
//! cargo run --release --example certify_routing -- [THRESHOLD]
//! ```

use std::env;

use metric_embed::harness::{generate_graph, GraphSpec};
use metric_embed::rng::Purpose;
use metric_embed::routing::{verify_or_rebuild, Demand, RoutingConfig, RoutingOperator};
use metric_embed::Substreams;

fn main() -> metric_embed::Result<()> {
    let threshold: f64 = env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5.0);
    let streams = Substreams::new(2);
    let spec: GraphSpec = "er:32:0.15".parse()?;
    let graph = generate_graph(&spec, &mut streams.stream(Purpose::Generator, 0, 0))?;

    let cert = verify_or_rebuild(&graph, RoutingConfig::default(), &streams, threshold)?;
    println!(
        "certified after {} attempt(s): max ratio {:.3} <= {threshold}",
        cert.attempts, cert.report.max_ratio
    );

    let dir = std::env::temp_dir().join("metric-embed-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("operator.json");
    std::fs::write(&path, serde_json::to_string(&cert.operator)?)?;
    let loaded: RoutingOperator = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
    loaded.check_graph(&graph)?;
    let d = Demand::pair(graph.n(), 0, graph.n() - 1, 1.0);
    println!(
        "reloaded from {}: same flow = {}",
        path.display(),
        loaded.apply(&d)? == cert.operator.apply(&d)?
    );
    Ok(())
}
