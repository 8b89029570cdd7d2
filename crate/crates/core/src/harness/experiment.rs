use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::estimators::{estimate_center_sum, estimate_separation};
use super::generators::{generate_graph, GraphSpec};
use super::oracle::opt_transshipment;
use crate::decomp::{ball_growth_profile, Mode};
use crate::error::{Error, Result};
use crate::graph::{parse_graph, GraphFormat, Vertex, WeightedGraph};
use crate::rng::{Purpose, Substreams};
use crate::routing::{
    build_routing_operator, check_identities, verify_competitive_ratio, Demand, IdentityOptions,
    LogBase, RoutingConfig, RoutingOperator,
};
use crate::sssp::sssp_exact;
use crate::tree::stretch_stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Stretch,
    Separation,
    CenterSum,
    BallGrowth,
    RoutingVerify,
    RoutingOracle,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Stretch,
        ExperimentKind::Separation,
        ExperimentKind::CenterSum,
        ExperimentKind::BallGrowth,
        ExperimentKind::RoutingVerify,
        ExperimentKind::RoutingOracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Stretch => "stretch",
            ExperimentKind::Separation => "separation",
            ExperimentKind::CenterSum => "center-sum",
            ExperimentKind::BallGrowth => "ball-growth",
            ExperimentKind::RoutingVerify => "routing-verify",
            ExperimentKind::RoutingOracle => "routing-oracle",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum GraphSource {
    File { path: PathBuf, format: GraphFormat },
    Generator { spec: GraphSpec },
}

impl GraphSource {
    /// Generated graphs draw from substream `(Generator, 0, 0)` of `seed`.
    pub fn load(&self, seed: u64) -> Result<WeightedGraph> {
        match self {
            GraphSource::File { path, format } => {
                parse_graph(BufReader::new(File::open(path)?), *format)
            }
            GraphSource::Generator { spec } => {
                let mut rng = Substreams::new(seed).stream(Purpose::Generator, 0, 0);
                generate_graph(spec, &mut rng)
            }
        }
    }
}

/// Multipliers applied to the asymptotic bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Constants {
    /// Separation frequency `<= separation * dist / 2^l`.
    pub separation: f64,
    /// Ball-growth radii `sum r_l <= r_sum * ln n + r_sum * L + 2`.
    pub r_sum: f64,
    /// Max mean stretch `<= stretch * ln n`.
    pub stretch: f64,
    /// Center-sum mean `<= center_sum * ln n`.
    pub center_sum: f64,
    /// Competitive ratio `<= ratio * ln n`.
    pub ratio: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants { separation: 2.0, r_sum: 4.0, stretch: 16.0, center_sum: 16.0, ratio: 64.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub graph: GraphSource,
    pub mode: Mode,
    pub trials: u64,
    /// Sampled pairs, vertices or demands, depending on the experiment.
    pub samples: usize,
    pub log_base: LogBase,
    pub constants: Constants,
    /// Where `write_report` puts the JSON (the CSV goes next to it).
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, graph: GraphSource) -> Self {
        ExperimentConfig {
            experiment,
            seed: 0,
            graph,
            mode: Mode::Exact,
            trials: 100,
            samples: 10,
            log_base: LogBase::Ln,
            constants: Constants::default(),
            out: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParam("trials must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Criterion {
    pub name: String,
    pub invariant: String,
    pub measured: f64,
    pub bound: f64,
    /// Slack added to `bound` (e.g. a 3-sigma band).
    pub tolerance: f64,
    /// `measured / ln n` where meaningful.
    pub constant: Option<f64>,
    pub pass: bool,
}

impl Criterion {
    fn at_most(name: impl Into<String>, invariant: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Self {
        Criterion {
            name: name.into(),
            invariant: invariant.into(),
            measured,
            bound,
            tolerance,
            constant: None,
            pass: measured <= bound + tolerance,
        }
    }

    fn with_constant(mut self, n: usize) -> Self {
        if n >= 2 {
            self.constant = Some(self.measured / (n as f64).ln());
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphInfo {
    pub n: usize,
    pub m: usize,
    pub max_weight: f64,
    pub levels: usize,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub graph: GraphInfo,
    pub criteria: Vec<Criterion>,
    pub measurements: Value,
    pub pass: bool,
    /// Kept out of the serialized report so reruns are byte-identical.
    #[serde(skip)]
    pub wall_clock_secs: f64,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One row per criterion.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["experiment", "criterion", "invariant", "measured", "bound", "tolerance", "constant", "pass"])?;
        for c in &self.criteria {
            w.write_record([
                self.experiment.clone(),
                c.name.clone(),
                c.invariant.clone(),
                c.measured.to_string(),
                c.bound.to_string(),
                c.tolerance.to_string(),
                c.constant.map(|x| x.to_string()).unwrap_or_default(),
                c.pass.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Writes `<path>` as JSON and `<path>` with extension `csv` as CSV.
pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, report.to_json()?)?;
    std::fs::write(path.with_extension("csv"), report.to_csv()?)?;
    Ok(())
}

fn ln(n: usize) -> f64 {
    (n.max(1) as f64).ln()
}

/// Uniform values in `[-1, 1]` shifted to sum to zero.
pub fn random_demand<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Demand {
    let mut d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let mean = d.iter().sum::<f64>() / n.max(1) as f64;
    for x in &mut d {
        *x -= mean;
    }
    Demand(d)
}

fn sample_vertices(n: usize, k: usize, streams: &Substreams) -> Vec<Vertex> {
    if k >= n {
        return (0..n).collect();
    }
    let mut rng = streams.stream(Purpose::Pairs, 1, 0);
    let mut picked = rand::seq::index::sample(&mut rng, n, k).into_vec();
    picked.sort_unstable();
    picked
}

fn sample_pairs(n: usize, k: usize, streams: &Substreams) -> Vec<(Vertex, Vertex)> {
    if n < 2 {
        return Vec::new();
    }
    let mut rng = streams.stream(Purpose::Pairs, 2, 0);
    (0..k)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            (u, v)
        })
        .collect()
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let started = Instant::now();
    let graph = config.graph.load(config.seed)?;
    let streams = Substreams::new(config.seed);
    let (criteria, measurements) = match config.experiment {
        ExperimentKind::Stretch => stretch(&graph, config, &streams)?,
        ExperimentKind::Separation => separation(&graph, config, &streams)?,
        ExperimentKind::CenterSum => center_sum(&graph, config, &streams)?,
        ExperimentKind::BallGrowth => ball_growth(&graph, config)?,
        ExperimentKind::RoutingVerify => routing_verify(&graph, config, &streams)?,
        ExperimentKind::RoutingOracle => routing_oracle(&graph, config, &streams)?,
    };
    let report = Report {
        experiment: config.experiment.name().to_string(),
        config: config.clone(),
        graph: GraphInfo {
            n: graph.n(),
            m: graph.m(),
            max_weight: graph.max_weight(),
            levels: graph.level_count(),
            hash: graph.content_hash(),
        },
        pass: criteria.iter().all(|c| c.pass),
        criteria,
        measurements,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    if let Some(path) = &config.out {
        write_report(&report, path)?;
    }
    Ok(report)
}

type Outcome = (Vec<Criterion>, Value);

fn stretch(graph: &WeightedGraph, cfg: &ExperimentConfig, streams: &Substreams) -> Result<Outcome> {
    let r = stretch_stats(graph, cfg.trials, cfg.mode, streams)?;
    let n = graph.n();
    let criteria = vec![
        Criterion::at_most("dominance", "dist_T(u,v) >= dist_G(u,v) on every tree", r.dominance_violations as f64, 0.0, 0.0),
        Criterion::at_most(
            "mean-stretch",
            "max over pairs of mean dist_T/dist_G <= C ln n",
            r.max_mean_stretch,
            cfg.constants.stretch * ln(n),
            0.0,
        )
        .with_constant(n),
    ];
    Ok((criteria, serde_json::to_value(&r)?))
}

fn separation(graph: &WeightedGraph, cfg: &ExperimentConfig, streams: &Substreams) -> Result<Outcome> {
    let mut criteria = Vec::new();
    let mut rows = Vec::new();
    for (i, (u, v)) in sample_pairs(graph.n(), cfg.samples, streams).into_iter().enumerate() {
        let dist = sssp_exact(graph, &[(u, 0.0)])?.dist[v];
        let first = dist.log2().ceil() as usize + 2;
        let pair_streams = streams.derive(i as u64);
        for level in first..first + 3 {
            let est = estimate_separation(graph, u, v, level, cfg.trials, cfg.mode, &pair_streams)?;
            let bound = (cfg.constants.separation * dist / 2f64.powi(level as i32)).min(1.0);
            let band = 3.0 * (bound * (1.0 - bound) / cfg.trials as f64).sqrt();
            criteria.push(Criterion::at_most(
                format!("separation({u},{v},l={level})"),
                "P[C_l(u) != C_l(v)] <= C dist(u,v) / 2^l",
                est.probability,
                bound,
                band,
            ));
            rows.push(est);
        }
    }
    Ok((criteria, serde_json::to_value(&rows)?))
}

fn center_sum(graph: &WeightedGraph, cfg: &ExperimentConfig, streams: &Substreams) -> Result<Outcome> {
    let n = graph.n();
    let bound = cfg.constants.center_sum * ln(n);
    let mut criteria = Vec::new();
    let mut rows = Vec::new();
    for v in sample_vertices(n, cfg.samples, streams) {
        let est = estimate_center_sum(graph, v, cfg.trials, cfg.mode, streams)?;
        criteria.push(
            Criterion::at_most(
                format!("center-sum({v})"),
                "E[sum_l centerDist_l(v) / 2^l] <= C ln n",
                est.mean,
                bound,
                0.0,
            )
            .with_constant(n),
        );
        rows.push(json!({ "vertex": v, "estimate": est }));
    }
    Ok((criteria, Value::Array(rows)))
}

fn ball_growth(graph: &WeightedGraph, cfg: &ExperimentConfig) -> Result<Outcome> {
    let n = graph.n();
    let top = graph.level_count() as f64;
    let r_bound = cfg.constants.r_sum * ln(n) + cfg.constants.r_sum * top + 2.0;
    let mut max_delta = 0u64;
    let mut max_r = 0.0f64;
    let mut broken = 0u64;
    let mut rows = Vec::new();
    for v in 0..n {
        let p = ball_growth_profile(graph, v)?;
        max_delta = max_delta.max(p.delta_sum());
        max_r = max_r.max(p.r_sum());
        broken += u64::from(!p.recurrence_holds());
        rows.push(json!({ "vertex": v, "deltaSum": p.delta_sum(), "rSum": p.r_sum() }));
    }
    let criteria = vec![
        Criterion::at_most("delta-sum", "sum_l Delta_l <= 2 ln n", max_delta as f64, 2.0 * ln(n), 0.0),
        Criterion::at_most("recurrence", "r_l = r_{l-1}/2 + Delta_l + 2 exactly", broken as f64, 0.0, 0.0),
        Criterion::at_most("r-sum", "sum_l r_l <= C ln n + C L + 2", max_r, r_bound, 0.0),
    ];
    Ok((criteria, Value::Array(rows)))
}

fn routing_config(cfg: &ExperimentConfig) -> RoutingConfig {
    RoutingConfig { mode: cfg.mode, log_base: cfg.log_base }
}

fn routing_verify(graph: &WeightedGraph, cfg: &ExperimentConfig, streams: &Substreams) -> Result<Outcome> {
    let n = graph.n();
    let op = build_routing_operator(graph, routing_config(cfg), streams)?;
    let threshold = cfg.constants.ratio * ln(n).max(std::f64::consts::LN_2);
    let ratio = verify_competitive_ratio(&op, graph, Some(threshold))?;
    let ids = check_identities(&op, graph, IdentityOptions { max_copy_pairs: Some(64) })?;
    let (conservation, adjoint) = conservation_and_adjoint(&op, graph, cfg.samples, streams)?;
    let criteria = vec![
        Criterion::at_most(
            "competitive-ratio",
            "max_e |A(1_u - 1_v)|_w / dist(u,v) <= C ln n",
            ratio.max_ratio,
            threshold,
            0.0,
        )
        .with_constant(n),
        Criterion::at_most("conservation", "divergence(A d) = d", conservation, 1e-9, 0.0),
        Criterion::at_most("adjoint", "<A d, y> = <d, A^T y>", adjoint, 1e-9, 0.0),
        Criterion::at_most("out-flow", "sum_{d',C'} f(v) = p(v)/w(v)", ids.out_flow_max_error, 1e-9, 0.0),
        Criterion::at_most("w-bounds", "Dcnt/16 <= w_l(v) <= Dcnt", f64::from(u8::from(!ids.w_bounds_ok)), 0.0, 0.0),
        Criterion::at_most(
            "path-expansion",
            "segment lists expand to center-to-center walks of weight m",
            f64::from(u8::from(!ids.path_expansion_ok)),
            0.0,
            0.0,
        ),
    ];
    let measurements = json!({
        "dcnt": op.dcnt,
        "segments": op.segments.len(),
        "nnz": op.columns.nnz(),
        "resamples": op.resamples(),
        "ratio": ratio,
        "identities": ids,
    });
    Ok((criteria, measurements))
}

/// Largest relative conservation error and adjoint mismatch over `samples`
/// random demands and edge vectors.
pub fn conservation_and_adjoint(
    op: &RoutingOperator,
    graph: &WeightedGraph,
    samples: usize,
    streams: &Substreams,
) -> Result<(f64, f64)> {
    let mut rng = streams.stream(Purpose::Demand, 0, 0);
    let (mut cons, mut adj) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let d = random_demand(graph.n(), &mut rng);
        let y: Vec<f64> = (0..graph.m()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let f = op.apply(&d)?;
        cons = cons.max(f.conservation_error(graph, &d));
        let lhs: f64 = f.0.iter().zip(&y).map(|(a, b)| a * b).sum();
        let aty = op.apply_transpose(&y)?;
        let rhs: f64 = d.0.iter().zip(&aty).map(|(a, b)| a * b).sum();
        adj = adj.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    Ok((cons, adj))
}

fn routing_oracle(graph: &WeightedGraph, cfg: &ExperimentConfig, streams: &Substreams) -> Result<Outcome> {
    let op = build_routing_operator(graph, routing_config(cfg), streams)?;
    let edge_max = verify_competitive_ratio(&op, graph, None)?.max_ratio;
    let mut rng = streams.stream(Purpose::Demand, 1, 0);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for _ in 0..cfg.samples {
        let d = random_demand(graph.n(), &mut rng);
        let opt = opt_transshipment(graph, &d)?;
        let cost = op.apply(&d)?.cost(graph);
        let r = if opt > 0.0 { cost / opt } else { 0.0 };
        worst = worst.max(r);
        rows.push(json!({ "opt": opt, "cost": cost, "ratio": r }));
    }
    let criteria = vec![Criterion::at_most(
        "oracle-ratio",
        "|A d|_w / OPT(d) <= max edge ratio",
        worst,
        edge_max,
        1e-9 * edge_max,
    )];
    Ok((criteria, json!({ "edgeRatioMax": edge_max, "demands": rows })))
}
