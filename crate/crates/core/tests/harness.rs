mod common;

use std::process::Command;

use metric_embed::decomp::Mode;
use metric_embed::harness::{
    binomial_band, estimate_separation, floyd_warshall, opt_transshipment, random_demand, run_experiment,
    transshipment_lower_bound, write_report, ExperimentConfig, ExperimentKind, GraphSource, GraphSpec, Report,
};
use metric_embed::routing::Demand;
use metric_embed::rng::Purpose;
use metric_embed::{GraphFormat, Substreams, WeightedGraph};

use common::{gen, k2, random_tree_parents};

/// On a tree the optimum pushes each subtree's net demand across its parent edge.
fn tree_opt(parent: &[Option<usize>], weight: &[f64], d: &[f64]) -> f64 {
    let mut net = d.to_vec();
    let mut cost = 0.0;
    for x in (1..parent.len()).rev() {
        let p = parent[x].unwrap();
        cost += weight[x] * net[x].abs();
        net[p] += net[x];
    }
    cost
}

#[test]
fn oracle_matches_closed_form_on_trees() {
    for seed in 0..8 {
        let parent = random_tree_parents(12, seed);
        let weight: Vec<f64> = (0..12).map(|x| 1.0 + (x * 7 % 5) as f64).collect();
        let edges: Vec<_> = (1..12).map(|x| (parent[x].unwrap(), x, weight[x])).collect();
        let g = WeightedGraph::from_edges(12, edges).unwrap();
        let mut rng = Substreams::new(seed).stream(Purpose::Demand, 0, 0);
        for _ in 0..10 {
            let d = random_demand(12, &mut rng);
            let opt = opt_transshipment(&g, &d).unwrap();
            assert!((opt - tree_opt(&parent, &weight, &d.0)).abs() < 1e-9);
        }
    }
}

#[test]
fn oracle_dominates_lower_bound() {
    let g = gen("er:10:0.4:w5", 2);
    let dist = floyd_warshall(&g);
    let mut rng = Substreams::new(1).stream(Purpose::Demand, 0, 0);
    for _ in 0..30 {
        let d = random_demand(g.n(), &mut rng);
        assert!(opt_transshipment(&g, &d).unwrap() >= transshipment_lower_bound(&dist, &d) - 1e-9);
    }
    let d = Demand(vec![1.0, 1.0, -2.0]);
    let tri = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
    assert!((opt_transshipment(&tri, &d).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn k2_separation_within_band() {
    let g = k2();
    let s = Substreams::new(4);
    for level in 2..=5 {
        let e = estimate_separation(&g, 0, 1, level, 4000, Mode::Exact, &s).unwrap();
        let b = 2.0 / 2f64.powi(level as i32);
        assert!(e.probability <= b + binomial_band(b, 4000), "level {level}: {}", e.probability);
    }
}

#[test]
fn every_experiment_passes_on_a_small_graph() {
    for kind in ExperimentKind::ALL {
        let spec: GraphSpec = if kind == ExperimentKind::RoutingOracle { "er:10:0.4" } else { "grid:5x5" }
            .parse()
            .unwrap();
        let mut cfg = ExperimentConfig::new(kind, GraphSource::Generator { spec });
        cfg.trials = 200;
        let report = run_experiment(&cfg).unwrap();
        assert!(report.pass, "{}: {:?}", kind.name(), report.criteria);
        assert!(!report.criteria.is_empty());
    }
}

#[test]
fn reports_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("g.txt");
    std::fs::write(&graph_path, gen("er:16:0.25:w3", 5).to_edge_list()).unwrap();
    let mut cfg = ExperimentConfig::new(
        ExperimentKind::BallGrowth,
        GraphSource::File { path: graph_path, format: GraphFormat::EdgeList },
    );
    cfg.seed = 3;
    let report = run_experiment(&cfg).unwrap();
    let out = dir.path().join("report.json");
    write_report(&report, &out).unwrap();
    let back: Report = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(back.criteria, report.criteria);
    assert_eq!(back.to_json().unwrap(), report.to_json().unwrap());
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    assert_eq!(csv, report.to_csv().unwrap());
    assert_eq!(csv.lines().count(), report.criteria.len() + 1);
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_metric-embed"))
}

fn run_ok(args: &[&str]) -> String {
    let out = cli().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn cli_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    std::fs::write(p("g.txt"), "4 4\n1 2 1\n2 3 2\n3 4 1\n4 1 3\n").unwrap();

    assert!(run_ok(&["parse", &p("g.txt")]).contains("\"n\": 4"));
    run_ok(&["decompose", "--level", "2", &p("g.txt")]);
    run_ok(&["--mode", "approx", "hierarchy", "--refined", "--gen", "grid:3x3"]);
    run_ok(&["tree", &p("g.txt")]);
    run_ok(&["--trials", "20", "stretch", &p("g.txt")]);
    run_ok(&["--trials", "50", "separation", "1", "3", "--level", "4", &p("g.txt")]);
    run_ok(&["--trials", "20", "center-sum", "2", &p("g.txt")]);
    run_ok(&["ball-growth", "--vertex", "1", &p("g.txt")]);

    run_ok(&["--out", &p("op.json"), "routing", "build", &p("g.txt")]);
    std::fs::write(p("d.txt"), "1\n0\n-1\n0\n").unwrap();
    let flow = run_ok(&["routing", "apply", &p("op.json"), &p("d.txt")]);
    assert_eq!(flow.lines().count(), 4);
    std::fs::write(p("y.txt"), "1\n0\n0\n1\n").unwrap();
    assert_eq!(run_ok(&["routing", "transpose", &p("op.json"), &p("y.txt")]).lines().count(), 4);
    run_ok(&["routing", "verify", &p("op.json"), &p("g.txt")]);
    run_ok(&["routing", "certify", &p("g.txt")]);

    let csv = run_ok(&["--format", "csv", "--trials", "20", "experiment", "run", "stretch", "--gen", "path:6"]);
    assert!(csv.starts_with("experiment,criterion"));
}

#[test]
fn cli_reruns_are_byte_identical() {
    let args = ["--seed", "5", "--trials", "30", "experiment", "run", "center-sum", "--gen", "er:20:0.2"];
    assert_eq!(run_ok(&args), run_ok(&args));
    let with_env = cli().args(&args[2..]).env("METRIC_EMBED_SEED", "5").output().unwrap();
    assert_eq!(String::from_utf8(with_env.stdout).unwrap(), run_ok(&args));
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3 1\n1 2 1\n").unwrap();
    let code = |args: &[&str]| cli().args(args).output().unwrap().status.code();
    assert_eq!(code(&["parse", bad.to_str().unwrap()]), Some(2));
    assert_eq!(code(&["parse", "/nonexistent/graph.txt"]), Some(2));
    assert_eq!(code(&["experiment", "run", "nope", "--gen", "path:3"]), Some(2));
    assert_eq!(code(&["no-such-verb"]), Some(2));
    assert_eq!(code(&["separation", "1", "9", "--level", "2", "--gen", "path:3"]), Some(2));
    assert_eq!(code(&["--trials", "5", "experiment", "run", "routing-verify", "--gen", "grid:3x3"]), Some(0));
}
