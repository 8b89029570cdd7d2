//! Acceptance run: every criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use metric_embed::decomp::{ball_growth_profile, default_eps, Mode};
use metric_embed::harness::{
    binomial_band, conservation_and_adjoint, estimate_center_sum, estimate_clustered, estimate_separation,
    opt_transshipment, random_demand, run_experiment, ExperimentConfig, ExperimentKind, GraphSource,
};
use metric_embed::rng::Purpose;
use metric_embed::routing::{
    build_routing_operator, ceil_lg, check_identities, verify_competitive_ratio, IdentityOptions,
    PathCollection, RoutingConfig, RoutingOperator,
};
use metric_embed::sssp::sssp_exact;
use metric_embed::tree::stretch_stats;
use metric_embed::{Substreams, WeightedGraph};
use rand::Rng;

use common::{gen, k2, random_tree_parents};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn ln(n: usize) -> f64 {
    (n as f64).ln()
}

/// Fifty small graphs of mixed shape and weight range.
fn small_corpus() -> Vec<(String, WeightedGraph)> {
    let mut rng = Substreams::new(2024).stream(Purpose::Generator, 9, 0);
    (0..50u64)
        .map(|i| {
            let w = [1, 1, 4, 16][rng.gen_range(0..4)];
            let spec = match i % 5 {
                0 => {
                    let rows = rng.gen_range(2..=6);
                    format!("grid:{rows}x{}", rng.gen_range(2..=48 / rows))
                }
                1 => {
                    let n = rng.gen_range(8..=48);
                    format!("er:{n}:{:.3}", (3.0 * ln(n) / n as f64).min(0.9))
                }
                2 => format!("rgg:{}:0.4", rng.gen_range(8..=40)),
                3 => format!("star:{}", rng.gen_range(3..=47)),
                _ => format!("path:{}", rng.gen_range(2..=48)),
            };
            let spec = format!("{spec}:w{w}");
            let g = gen(&spec, 100 + i);
            (spec, g)
        })
        .collect()
}

fn stretch_corpus() -> Vec<(String, WeightedGraph)> {
    let mut out = vec![("grid:8x8".to_string(), gen("grid:8x8", 1))];
    for s in 0..5 {
        out.push((format!("er:64:0.1 #{s}"), gen("er:64:0.1", 10 + s)));
    }
    out
}

fn mid_corpus() -> Vec<(String, WeightedGraph)> {
    [("grid:8x8", 1), ("er:64:0.1", 2), ("rgg:64:0.25", 3), ("er:32:0.2:w16", 4)]
        .into_iter()
        .map(|(s, seed)| (s.to_string(), gen(s, seed)))
        .collect()
}

fn sixteen_corpus() -> Vec<(String, WeightedGraph)> {
    [("grid:4x4:w64", 5), ("er:16:0.3:w64", 6), ("path:16:w64", 7), ("star:15:w64", 8), ("rgg:16:0.5:w64", 9)]
        .into_iter()
        .map(|(s, seed)| (s.to_string(), gen(s, seed)))
        .collect()
}

fn routing_corpus() -> Vec<(String, WeightedGraph)> {
    let mut out: Vec<(String, WeightedGraph)> = [
        ("grid:6x6", 11),
        ("er:32:0.15", 12),
        ("er:32:0.2", 13),
        ("rgg:32:0.35:w8", 14),
        ("path:10", 15),
        ("star:8:w4", 16),
        ("er:12:0.3", 17),
    ]
    .into_iter()
    .map(|(s, seed)| (s.to_string(), gen(s, seed)))
    .collect();
    out.push(("K2".into(), k2()));
    out
}

fn build(g: &WeightedGraph, mode: Mode, seed: u64) -> RoutingOperator {
    build_routing_operator(g, RoutingConfig { mode, ..RoutingConfig::default() }, &Substreams::new(seed))
        .expect("operator builds")
}

fn c1_dominance() -> Outcome {
    let corpus = small_corpus();
    let mut violations = 0;
    let mut worst_min: f64 = f64::INFINITY;
    for (i, (_, g)) in corpus.iter().enumerate() {
        let r = stretch_stats(g, 20, Mode::Exact, &Substreams::new(i as u64)).unwrap();
        violations += r.dominance_violations;
        worst_min = worst_min.min(r.min_stretch);
    }
    outcome(
        violations == 0,
        format!("{} graphs x 20 trees: {violations} violations, smallest stretch {worst_min:.4}", corpus.len()),
    )
}

fn c2_stretch() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, g)) in stretch_corpus().iter().enumerate() {
        let r = stretch_stats(g, 200, Mode::Exact, &Substreams::new(50 + i as u64)).unwrap();
        let bound = 16.0 * ln(g.n());
        ok &= r.max_mean_stretch <= bound;
        parts.push(format!("{name}: {:.2} (c = {:.2})", r.max_mean_stretch, r.measured_constant()));
    }
    outcome(ok, format!("bound 16 ln 64 = {:.2}; {}", 16.0 * ln(64), parts.join(", ")))
}

fn c3_separation() -> Outcome {
    let mut checks = 0;
    let mut fails = 0;
    let mut worst = f64::NEG_INFINITY;
    for (gi, (_, g)) in mid_corpus().iter().enumerate() {
        let mut rng = Substreams::new(70 + gi as u64).stream(Purpose::Pairs, 0, 0);
        for k in 0..5 {
            let u = rng.gen_range(0..g.n());
            let v = (u + rng.gen_range(1..g.n())) % g.n();
            let dist = sssp_exact(g, &[(u, 0.0)]).unwrap().dist[v];
            let first = dist.log2().ceil() as usize + 2;
            let streams = Substreams::new(1000 * gi as u64 + k);
            for level in first..first + 3 {
                let e = estimate_separation(g, u, v, level, 4000, Mode::Exact, &streams).unwrap();
                let b = (2.0 * dist / 2f64.powi(level as i32)).min(1.0);
                let limit = b + binomial_band(b, 4000);
                checks += 1;
                if e.probability > limit {
                    fails += 1;
                }
                worst = worst.max(e.probability - limit);
            }
        }
    }
    outcome(
        fails == 0 && checks == 60,
        format!("{checks} (pair, scale) checks, {fails} above 2 dist/2^l + 3 sigma; max excess {worst:.4}"),
    )
}

fn c4_center_sum() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (gi, (name, g)) in mid_corpus().iter().enumerate() {
        let bound = 16.0 * ln(g.n());
        let mut rng = Substreams::new(90 + gi as u64).stream(Purpose::Pairs, 1, 0);
        let vertices = rand::seq::index::sample(&mut rng, g.n(), 10).into_vec();
        for mode in [Mode::Exact, Mode::approximate()] {
            let streams = Substreams::new(300 + gi as u64);
            let worst = vertices
                .iter()
                .map(|&v| estimate_center_sum(g, v, 500, mode, &streams).unwrap().mean)
                .fold(0.0, f64::max);
            ok &= worst <= bound;
            parts.push(format!("{name}/{}: {worst:.2}", mode.name()));
        }
    }
    outcome(ok, format!("bound 16 ln n; worst vertex mean {}", parts.join(", ")))
}

fn c5_ball_growth() -> Outcome {
    let mut graphs = small_corpus();
    graphs.extend(stretch_corpus());
    graphs.extend(mid_corpus());
    graphs.extend(sixteen_corpus());
    graphs.extend(routing_corpus());
    let mut vertices = 0;
    let mut bad = 0;
    let mut tightest: f64 = f64::INFINITY;
    for (_, g) in &graphs {
        for v in 0..g.n() {
            let p = ball_growth_profile(g, v).unwrap();
            let slack = 2.0 * ln(g.n()) - p.delta_sum() as f64;
            vertices += 1;
            if slack < 0.0 || !p.recurrence_holds() {
                bad += 1;
            }
            tightest = tightest.min(slack);
        }
    }
    outcome(
        bad == 0,
        format!("{} graphs, {vertices} vertices, {bad} failures; min slack 2 ln n - sum delta = {tightest:.3}", graphs.len()),
    )
}

fn c6_approx_clustering() -> Outcome {
    let mut min_clustered: f64 = 1.0;
    let mut min_contained: f64 = 1.0;
    let mut blurred_any = false;
    for (gi, (_, g)) in sixteen_corpus().iter().enumerate() {
        for scale in [64.0, 256.0, 1024.0, 4096.0] {
            let streams = Substreams::new(500 + gi as u64);
            let est = estimate_clustered(g, scale, None, 2000, &streams).unwrap();
            for e in &est {
                min_clustered = min_clustered.min(e.clustered);
                min_contained = min_contained.min(e.contained);
                blurred_any |= e.clustered < 1.0;
            }
        }
    }
    outcome(
        min_clustered >= 0.45 && min_contained >= 0.45,
        format!(
            "eps = {:.4}; min clustered {min_clustered:.4}, min B(v, D/8) contained {min_contained:.4}, blur active: {blurred_any}",
            default_eps(16)
        ),
    )
}

fn c7_conservation() -> Outcome {
    let (mut cons, mut adj) = (0.0f64, 0.0f64);
    let mut graphs = routing_corpus();
    graphs.push(("er:24:0.2:w8 approx".into(), gen("er:24:0.2:w8", 18)));
    for (i, (name, g)) in graphs.iter().enumerate() {
        let mode = if name.ends_with("approx") { Mode::approximate() } else { Mode::Exact };
        let op = build(g, mode, 600 + i as u64);
        let (c, a) = conservation_and_adjoint(&op, g, 100, &Substreams::new(i as u64)).unwrap();
        cons = cons.max(c);
        adj = adj.max(a);
    }
    outcome(
        cons <= 1e-9 && adj <= 1e-9,
        format!("{} graphs x 100 demands: max |div(Ad) - d| / |d|_1 = {cons:.2e}, adjoint mismatch {adj:.2e}", graphs.len()),
    )
}

fn c8_ratio() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let graphs = [("grid:6x6", gen("grid:6x6", 11)), ("er:32:0.15", gen("er:32:0.15", 12)), ("rgg:32:0.35:w8", gen("rgg:32:0.35:w8", 14))];
    for (i, (name, g)) in graphs.iter().enumerate() {
        let bound = 64.0 * ln(g.n());
        let r = verify_competitive_ratio(&build(g, Mode::Exact, 700 + i as u64), g, Some(bound)).unwrap();
        ok &= r.pass;
        parts.push(format!("{name}: {:.2}/{bound:.1}", r.max_ratio));
    }
    let k2g = k2();
    let r = verify_competitive_ratio(&build(&k2g, Mode::Exact, 1), &k2g, None).unwrap();
    ok &= r.max_ratio == 1.0 && r.max_ratio_unweighted == 1.0;
    parts.push(format!("K2: {}", r.max_ratio));

    let mut worst_excess = f64::NEG_INFINITY;
    for (i, spec) in ["er:12:0.3", "grid:3x4:w4", "rgg:10:0.5:w8"].into_iter().enumerate() {
        let g = gen(spec, 800 + i as u64);
        let op = build(&g, Mode::Exact, 810 + i as u64);
        let edge_max = verify_competitive_ratio(&op, &g, None).unwrap().max_ratio;
        let mut rng = Substreams::new(i as u64).stream(Purpose::Demand, 1, 0);
        for _ in 0..100 {
            let d = random_demand(g.n(), &mut rng);
            let ratio = op.apply(&d).unwrap().cost(&g) / opt_transshipment(&g, &d).unwrap();
            ok &= ratio <= edge_max + 1e-9;
            worst_excess = worst_excess.max(ratio - edge_max);
        }
    }
    parts.push(format!("oracle: max (ratio - edge max) = {worst_excess:.3}"));
    outcome(ok, parts.join(", "))
}

fn c9_identities() -> Outcome {
    let mut ok = true;
    let mut out_err: f64 = 0.0;
    let (mut w_lo, mut w_hi) = (f64::INFINITY, 0.0f64);
    for (i, (_, g)) in routing_corpus().iter().enumerate() {
        let op = build(g, Mode::Exact, 900 + i as u64);
        let r = check_identities(&op, g, IdentityOptions::default()).unwrap();
        ok &= r.pass && r.w_bounds_ok;
        out_err = out_err.max(r.out_flow_max_error);
        w_lo = w_lo.min(r.w_min_over_dcnt);
        w_hi = w_hi.max(r.w_max_over_dcnt);
    }

    let mut forests: Vec<Vec<Option<usize>>> = (0..20).map(|s| random_tree_parents(512, s)).collect();
    // Long paths and brooms stress the interval bound rather than the path count.
    forests.push((0..512usize).map(|x| x.checked_sub(1)).collect());
    forests.push((0..512usize).map(|x| (x > 0).then(|| if x < 256 { x - 1 } else { x % 256 })).collect());
    for (i, (_, g)) in routing_corpus().iter().enumerate() {
        let op = build(g, Mode::Exact, 900 + i as u64);
        for lvl in &op.levels {
            forests.extend(lvl.copies.iter().map(|c| c.clustering.parent.clone()));
        }
    }
    let (mut roots_checked, mut intervals) = (0usize, 0usize);
    let mut path_bound_ok = true;
    for parent in &forests {
        let n = parent.len();
        let pc = PathCollection::from_forest(parent);
        let lg = ceil_lg(n);
        for v in 0..n {
            let touched = pc.paths_on_root_path(v);
            let segs = pc.decompose_root_path(v).len();
            path_bound_ok &= touched <= lg + 1 && segs <= (lg + 1) * (2 * lg + 2);
            roots_checked += 1;
        }
        for id in 0..pc.path_count() {
            let len = pc.edge_count(id);
            let cap = 2 * ceil_lg(len) + 2;
            for s in 0..=len {
                for e in s..=len {
                    path_bound_ok &= pc.decompose_interval(id, s, e).len() <= cap;
                    intervals += 1;
                }
            }
        }
    }
    ok &= path_bound_ok;
    outcome(
        ok,
        format!(
            "out-flow error {out_err:.1e}, w/Dcnt in [{w_lo:.3}, {w_hi:.3}]; {} forests, {roots_checked} root paths, {intervals} intervals within bounds: {path_bound_ok}",
            forests.len()
        ),
    )
}

fn c10_determinism() -> Outcome {
    let mut same = 0;
    let mut total = 0;
    for kind in ExperimentKind::ALL {
        let spec = if kind == ExperimentKind::RoutingOracle { "er:10:0.4" } else { "er:20:0.25:w4" };
        let mut cfg = ExperimentConfig::new(kind, GraphSource::Generator { spec: spec.parse().unwrap() });
        cfg.seed = 77;
        cfg.trials = 40;
        cfg.samples = 5;
        for mode in [Mode::Exact, Mode::approximate()] {
            cfg.mode = mode;
            let a = run_experiment(&cfg).unwrap();
            let b = run_experiment(&cfg).unwrap();
            total += 1;
            if a.to_json().unwrap() == b.to_json().unwrap() && a.to_csv().unwrap() == b.to_csv().unwrap() {
                same += 1;
            }
        }
    }
    outcome(same == total, format!("{same}/{total} experiment reruns byte-identical (JSON and CSV)"))
}

type Check = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Check; 10] = [
        ("1 dominance", 60, c1_dominance),
        ("2 stretch", 300, c2_stretch),
        ("3 separation", 180, c3_separation),
        ("4 center-sum", 300, c4_center_sum),
        ("5 ball-growth", 30, c5_ball_growth),
        ("6 approx-clustering", 120, c6_approx_clustering),
        ("7 conservation", 120, c7_conservation),
        ("8 competitive-ratio", 600, c8_ratio),
        ("9 identities", 120, c9_identities),
        ("10 determinism", 60, c10_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, limit, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let pass = o.ok && took < Duration::from_secs(limit);
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.2}s, limit {limit}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
