//! Run every experiment on a generated graph and print its criteria.
//!
//! ```bash
//! cargo run --release --example experiments -- [GENERATOR_SPEC]
//! ```

use std::env;

use metric_embed::harness::{run_experiment, ExperimentConfig, ExperimentKind, GraphSource, GraphSpec};

fn main() -> metric_embed::Result<()> {
    let spec: GraphSpec = env::args().nth(1).as_deref().unwrap_or("grid:6x6").parse()?;
    for kind in ExperimentKind::ALL {
        let graph = if kind == ExperimentKind::RoutingOracle {
            GraphSource::Generator { spec: "er:12:0.3".parse()? }
        } else {
            GraphSource::Generator { spec: spec.clone() }
        };
        let mut cfg = ExperimentConfig::new(kind, graph);
        cfg.seed = 1;
        let report = run_experiment(&cfg)?;
        println!("{} ({:.2}s)", kind.name(), report.wall_clock_secs);
        for c in &report.criteria {
            println!(
                "  {} {}: measured {:.4}, bound {:.4} + {:.4}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.bound,
                c.tolerance
            );
        }
    }
    Ok(())
}
