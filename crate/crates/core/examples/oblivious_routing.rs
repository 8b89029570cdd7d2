//! Build an oblivious routing operator, route a demand, and check the flow.
//!
//! ```bash
//! cargo run --release --example oblivious_routing
//! ```

use metric_embed::decomp::Mode;
use metric_embed::harness::{generate_graph, GraphSpec};
use metric_embed::rng::Purpose;
use metric_embed::routing::{
    build_routing_operator, check_identities, verify_competitive_ratio, Demand, IdentityOptions, RoutingConfig,
};
use metric_embed::Substreams;

fn main() -> metric_embed::Result<()> {
    let streams = Substreams::new(11);
    let graph = generate_graph(&GraphSpec::grid(6, 6), &mut streams.stream(Purpose::Generator, 0, 0))?;
    let op = build_routing_operator(&graph, RoutingConfig { mode: Mode::Exact, ..Default::default() }, &streams)?;
    println!(
        "operator: L = {}, Dcnt = {}, {} segments ({} edge slots), {} coefficients, {} resamples",
        op.top,
        op.dcnt,
        op.segments.len(),
        op.segments.total_len(),
        op.columns.nnz(),
        op.resamples()
    );

    // Two units from one corner, one unit back into each of the others.
    let mut d = vec![0.0; graph.n()];
    d[0] = 2.0;
    d[5] = -1.0;
    d[35] = -1.0;
    let demand = Demand::new(d)?;
    let flow = op.apply(&demand)?;
    println!(
        "routed demand: cost {:.3}, |f|_1 {:.3}, conservation error {:.1e}",
        flow.cost(&graph),
        flow.l1(),
        flow.conservation_error(&graph, &demand)
    );

    let ratio = verify_competitive_ratio(&op, &graph, Some(64.0 * (graph.n() as f64).ln()))?;
    println!("edge ratio: max {:.3}, mean {:.3}, pass {}", ratio.max_ratio, ratio.mean_ratio, ratio.pass);
    for b in &ratio.histogram {
        println!("  [{:>3}, {:>3}): {}", b.lo, b.hi, b.count);
    }

    let ids = check_identities(&op, &graph, IdentityOptions { max_copy_pairs: Some(64) })?;
    println!(
        "identities: out-flow {:.1e}, in-flow {:.1e}, w/Dcnt in [{:.3}, {:.3}], pass {}",
        ids.out_flow_max_error, ids.in_flow_max_error, ids.w_min_over_dcnt, ids.w_max_over_dcnt, ids.pass
    );
    Ok(())
}
