//! One random-shift decomposition, exact and approximate.
//!
//! ```bash
//! cargo run --example decompose -- [GRAPH_FILE] [LEVEL] [SEED]
//! ```

use std::env;
use std::fs::File;
use std::io::BufReader;

use metric_embed::decomp::{decompose, Mode};
use metric_embed::rng::Purpose;
use metric_embed::{parse_graph, GraphFormat, Substreams};

fn main() -> metric_embed::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let path = args.first().map_or("crates/core/examples/data/two_cities.txt", String::as_str);
    let level: i32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(7);

    let graph = parse_graph(BufReader::new(File::open(path)?), GraphFormat::EdgeList)?;
    let scale = 2f64.powi(level);
    println!("n = {}, m = {}, scale D = {scale}", graph.n(), graph.m());

    for mode in [Mode::Exact, Mode::approximate()] {
        let mut rng = Substreams::new(seed).stream(Purpose::Decomposition, level as usize, 0);
        let c = decompose(&graph, scale, mode, &mut rng)?;
        println!("\n{} mode: {} clusters", mode.name(), c.cluster_count());
        for (id, members) in c.members().iter().enumerate() {
            let ids: Vec<usize> = members.iter().map(|v| v + 1).collect();
            println!("  center {:>2}: {:?}", c.centers[id] + 1, ids);
        }
        let loose: Vec<usize> = (0..graph.n()).filter(|&v| !c.is_clustered(v)).map(|v| v + 1).collect();
        if !loose.is_empty() {
            println!("  unclustered: {loose:?}");
        }
    }
    Ok(())
}
