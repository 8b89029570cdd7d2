//! Command-line front end over the `metric_embed` library.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use metric_embed::decomp::{ball_growth_profile, build_hierarchy, decompose, refine, Mode};
use metric_embed::harness::{
    estimate_center_sum, estimate_separation, run_experiment, Constants, ExperimentConfig,
    ExperimentKind, GraphSource, GraphSpec,
};
use metric_embed::rng::Purpose;
use metric_embed::routing::{
    build_routing_operator, verify_competitive_ratio, verify_or_rebuild, Demand, LogBase,
    RoutingConfig, RoutingOperator,
};
use metric_embed::tree::{build_tree, stretch_stats};
use metric_embed::{Error, GraphFormat, Substreams, WeightedGraph};

#[derive(Parser)]
#[command(name = "metric-embed", version, about = "Low-diameter decompositions, tree embeddings and oblivious routing")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, env = "METRIC_EMBED_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Blur tolerance in approximate mode (default 1 / (40 ln n)).
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true, default_value_t = 100)]
    trials: u64,
    #[arg(long = "dcnt-log-base", global = true, value_enum, default_value_t = LogBaseArg::Ln)]
    log_base: LogBaseArg,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Approx,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogBaseArg {
    Ln,
    Lg,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum InFormat {
    EdgeList,
    Dimacs,
}

/// A graph file or a `--gen` generator spec such as `grid:8x8` or `er:64:0.1`.
#[derive(Args, Clone)]
struct GraphArg {
    /// Graph file.
    #[arg(required_unless_present = "gen", conflicts_with = "gen")]
    graph: Option<PathBuf>,
    #[arg(long = "input-format", value_enum, default_value_t = InFormat::EdgeList)]
    input_format: InFormat,
    /// Generator: grid:RxC, rgg:N:R, er:N:P, star:K, path:K, optional :wMAX suffix.
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a graph and print its summary.
    Parse {
        #[command(flatten)]
        graph: GraphArg,
    },
    /// One random-shift decomposition at scale 2^level.
    Decompose {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        level: usize,
    },
    /// A full hierarchy of decompositions.
    Hierarchy {
        #[command(flatten)]
        graph: GraphArg,
        /// Also print the refined hierarchy.
        #[arg(long)]
        refined: bool,
    },
    /// One tree embedding.
    Tree {
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Stretch statistics over `--trials` trees.
    Stretch {
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Separation frequency of u and v at scale 2^level (1-based ids).
    Separation {
        u: usize,
        v: usize,
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        level: usize,
    },
    /// Mean of sum_l centerDist_l(v) / 2^l over hierarchies (1-based id).
    CenterSum {
        v: usize,
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Ball-growth profile of every vertex, or of one (1-based id).
    BallGrowth {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        vertex: Option<usize>,
    },
    /// Oblivious routing operators.
    Routing {
        #[command(subcommand)]
        command: RoutingCommand,
    },
    /// Experiments with pass/fail criteria.
    Experiment {
        #[command(subcommand)]
        command: ExperimentCommand,
    },
}

#[derive(Subcommand)]
enum RoutingCommand {
    /// Build an operator and write it as JSON.
    Build {
        #[command(flatten)]
        graph: GraphArg,
    },
    /// f = A d for a demand file (one value per line), flow written one value per line.
    Apply {
        operator: PathBuf,
        demand: PathBuf,
    },
    /// A^T y for an edge-value file.
    Transpose {
        operator: PathBuf,
        values: PathBuf,
    },
    /// Competitive ratio of a stored operator.
    Verify {
        operator: PathBuf,
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Build until the competitive ratio is at most the threshold.
    Certify {
        #[command(flatten)]
        graph: GraphArg,
        /// Default 64 ln n.
        #[arg(long)]
        threshold: Option<f64>,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Run one experiment; exit code 0 iff every criterion passes.
    Run {
        /// stretch, separation, center-sum, ball-growth, routing-verify or routing-oracle.
        name: String,
        #[command(flatten)]
        graph: GraphArg,
        /// Pairs, vertices or demands to sample.
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

impl Global {
    fn mode(&self) -> Mode {
        match self.mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Approx => Mode::Approximate { eps: self.eps },
        }
    }

    fn routing(&self) -> RoutingConfig {
        let log_base = match self.log_base {
            LogBaseArg::Ln => LogBase::Ln,
            LogBaseArg::Lg => LogBase::Lg,
        };
        RoutingConfig { mode: self.mode(), log_base }
    }

    fn streams(&self) -> Substreams {
        Substreams::new(self.seed)
    }

    fn emit(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(p) => std::fs::write(p, text)?,
            None => io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    /// JSON, or a CSV of one row per top-level field when `--format csv`.
    fn emit_value<T: Serialize>(&self, value: &T) -> Result<(), Error> {
        let v = serde_json::to_value(value)?;
        match self.format {
            OutFormat::Json => self.emit(&(serde_json::to_string_pretty(&v)? + "\n")),
            OutFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["field", "value"])?;
                match &v {
                    serde_json::Value::Object(map) => {
                        for (k, x) in map {
                            w.write_record([k.as_str(), &x.to_string()])?;
                        }
                    }
                    other => w.write_record(["value", &other.to_string()])?,
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                self.emit(&String::from_utf8_lossy(&bytes))
            }
        }
    }
}

impl GraphArg {
    fn source(&self) -> Result<GraphSource, Error> {
        match (&self.graph, &self.gen) {
            (_, Some(spec)) => Ok(GraphSource::Generator { spec: spec.parse::<GraphSpec>()? }),
            (Some(path), None) => {
                let format = match self.input_format {
                    InFormat::EdgeList => GraphFormat::EdgeList,
                    InFormat::Dimacs => GraphFormat::Dimacs,
                };
                Ok(GraphSource::File { path: path.clone(), format })
            }
            (None, None) => Err(Error::InvalidParam("a graph file or --gen is required".into())),
        }
    }

    fn load(&self, seed: u64) -> Result<WeightedGraph, Error> {
        self.source()?.load(seed)
    }
}

fn vertex(graph: &WeightedGraph, one_based: usize) -> Result<usize, Error> {
    if one_based == 0 || one_based > graph.n() {
        return Err(Error::UnknownVertex(one_based));
    }
    Ok(one_based - 1)
}

fn read_vector(path: &Path) -> Result<Vec<f64>, Error> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(t.parse().map_err(|_| Error::Parse { line: i + 1, msg: format!("not a number: `{t}`") })?);
    }
    Ok(out)
}

fn vector_text(values: &[f64]) -> String {
    values.iter().map(|x| format!("{x}\n")).collect()
}

fn read_operator(path: &Path) -> Result<RoutingOperator, Error> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

fn default_threshold(n: usize) -> f64 {
    Constants::default().ratio * (n.max(2) as f64).ln()
}

/// Exit status of a completed command: `Ok(true)` pass, `Ok(false)` fail.
fn run(cli: Cli) -> Result<bool, Error> {
    let g = &cli.global;
    let streams = g.streams();
    match cli.command {
        Command::Parse { graph } => {
            let gr = graph.load(g.seed)?;
            g.emit_value(&serde_json::json!({
                "n": gr.n(),
                "m": gr.m(),
                "maxWeight": gr.max_weight(),
                "levels": gr.level_count(),
                "hash": gr.content_hash(),
            }))?;
        }
        Command::Decompose { graph, level } => {
            let gr = graph.load(g.seed)?;
            let mut rng = streams.stream(Purpose::Decomposition, level, 0);
            let c = decompose(&gr, 2f64.powi(level as i32), g.mode(), &mut rng)?;
            g.emit_value(&c)?;
        }
        Command::Hierarchy { graph, refined } => {
            let gr = graph.load(g.seed)?;
            let h = build_hierarchy(&gr, g.mode(), &streams, 0)?;
            if refined {
                g.emit_value(&serde_json::json!({ "hierarchy": h, "refined": refine(&h, &gr) }))?;
            } else {
                g.emit_value(&h)?;
            }
        }
        Command::Tree { graph } => {
            let gr = graph.load(g.seed)?;
            let h = build_hierarchy(&gr, g.mode(), &streams, 0)?;
            g.emit_value(&build_tree(&refine(&h, &gr), &gr))?;
        }
        Command::Stretch { graph } => {
            let gr = graph.load(g.seed)?;
            g.emit_value(&stretch_stats(&gr, g.trials, g.mode(), &streams)?)?;
        }
        Command::Separation { graph, u, v, level } => {
            let gr = graph.load(g.seed)?;
            let (u, v) = (vertex(&gr, u)?, vertex(&gr, v)?);
            g.emit_value(&estimate_separation(&gr, u, v, level, g.trials, g.mode(), &streams)?)?;
        }
        Command::CenterSum { graph, v } => {
            let gr = graph.load(g.seed)?;
            let v = vertex(&gr, v)?;
            g.emit_value(&estimate_center_sum(&gr, v, g.trials, g.mode(), &streams)?)?;
        }
        Command::BallGrowth { graph, vertex: one } => {
            let gr = graph.load(g.seed)?;
            let vs: Vec<usize> = match one {
                Some(x) => vec![vertex(&gr, x)?],
                None => (0..gr.n()).collect(),
            };
            let profiles = vs.into_iter().map(|v| ball_growth_profile(&gr, v)).collect::<Result<Vec<_>, _>>()?;
            g.emit_value(&profiles)?;
        }
        Command::Routing { command } => return routing(g, &streams, command),
        Command::Experiment { command: ExperimentCommand::Run { name, graph, samples } } => {
            let mut cfg = ExperimentConfig::new(name.parse::<ExperimentKind>()?, graph.source()?);
            cfg.seed = g.seed;
            cfg.mode = g.mode();
            cfg.trials = g.trials;
            cfg.samples = samples;
            cfg.log_base = g.routing().log_base;
            let report = run_experiment(&cfg)?;
            eprintln!("{}: wall clock {:.3} s", report.experiment, report.wall_clock_secs);
            let text = match g.format {
                OutFormat::Json => report.to_json()?,
                OutFormat::Csv => report.to_csv()?,
            };
            match &g.out {
                Some(p) => {
                    std::fs::write(p, report.to_json()?)?;
                    std::fs::write(p.with_extension("csv"), report.to_csv()?)?;
                }
                None => g.emit(&text)?,
            }
            for c in &report.criteria {
                eprintln!("{} {}: measured {} (bound {} + {})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.measured, c.bound, c.tolerance);
            }
            return Ok(report.pass);
        }
    }
    Ok(true)
}

fn routing(g: &Global, streams: &Substreams, command: RoutingCommand) -> Result<bool, Error> {
    match command {
        RoutingCommand::Build { graph } => {
            let gr = graph.load(g.seed)?;
            let op = build_routing_operator(&gr, g.routing(), streams)?;
            g.emit(&serde_json::to_string(&op)?)?;
        }
        RoutingCommand::Apply { operator, demand } => {
            let op = read_operator(&operator)?;
            let f = op.apply(&Demand(read_vector(&demand)?))?;
            g.emit(&vector_text(&f.0))?;
        }
        RoutingCommand::Transpose { operator, values } => {
            let op = read_operator(&operator)?;
            g.emit(&vector_text(&op.apply_transpose(&read_vector(&values)?)?))?;
        }
        RoutingCommand::Verify { operator, graph, threshold } => {
            let op = read_operator(&operator)?;
            let gr = graph.load(g.seed)?;
            let t = threshold.unwrap_or_else(|| default_threshold(gr.n()));
            let report = verify_competitive_ratio(&op, &gr, Some(t))?;
            g.emit_value(&report)?;
            return Ok(report.pass);
        }
        RoutingCommand::Certify { graph, threshold } => {
            let gr = graph.load(g.seed)?;
            let t = threshold.unwrap_or_else(|| default_threshold(gr.n()));
            let c = verify_or_rebuild(&gr, g.routing(), streams, t)?;
            eprintln!("certified after {} attempt(s), max ratio {}", c.attempts, c.report.max_ratio);
            g.emit(&serde_json::to_string(&c.operator)?)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ResampleBudget { .. } => 1,
                _ => 2,
            })
        }
    }
}
