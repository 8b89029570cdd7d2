use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Attempts a random generator gets to produce a connected graph.
pub const GENERATOR_RETRIES: usize = 64;

/// A generated graph family. Edge weights are integers drawn uniformly from
/// `1..=max_weight` (all 1 when `max_weight == 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSpec {
    Grid { rows: usize, cols: usize, max_weight: u32 },
    RandomGeometric { n: usize, radius: f64, max_weight: u32 },
    ErdosRenyiConnected { n: usize, p: f64, max_weight: u32 },
    Star { leaves: usize, max_weight: u32 },
    Path { k: usize, max_weight: u32 },
}

impl GraphSpec {
    pub fn grid(rows: usize, cols: usize) -> Self {
        GraphSpec::Grid { rows, cols, max_weight: 1 }
    }

    pub fn erdos_renyi(n: usize, p: f64) -> Self {
        GraphSpec::ErdosRenyiConnected { n, p, max_weight: 1 }
    }

    pub fn random_geometric(n: usize, radius: f64) -> Self {
        GraphSpec::RandomGeometric { n, radius, max_weight: 1 }
    }

    pub fn star(leaves: usize) -> Self {
        GraphSpec::Star { leaves, max_weight: 1 }
    }

    pub fn path(k: usize) -> Self {
        GraphSpec::Path { k, max_weight: 1 }
    }

    pub fn with_max_weight(mut self, w: u32) -> Self {
        match &mut self {
            GraphSpec::Grid { max_weight, .. }
            | GraphSpec::RandomGeometric { max_weight, .. }
            | GraphSpec::ErdosRenyiConnected { max_weight, .. }
            | GraphSpec::Star { max_weight, .. }
            | GraphSpec::Path { max_weight, .. } => *max_weight = w,
        }
        self
    }

    fn max_weight(&self) -> u32 {
        match *self {
            GraphSpec::Grid { max_weight, .. }
            | GraphSpec::RandomGeometric { max_weight, .. }
            | GraphSpec::ErdosRenyiConnected { max_weight, .. }
            | GraphSpec::Star { max_weight, .. }
            | GraphSpec::Path { max_weight, .. } => max_weight,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParam(format!("{self}: {msg}")));
        if self.max_weight() == 0 {
            return bad("max weight must be at least 1");
        }
        match *self {
            GraphSpec::Grid { rows, cols, .. } if rows == 0 || cols == 0 => bad("empty grid"),
            GraphSpec::RandomGeometric { n, radius, .. } if n == 0 || radius.is_nan() || radius <= 0.0 => {
                bad("need n >= 1 and radius > 0")
            }
            GraphSpec::ErdosRenyiConnected { n, p, .. } if n == 0 || !(p > 0.0 && p <= 1.0) => {
                bad("need n >= 1 and p in (0, 1]")
            }
            GraphSpec::Path { k: 0, .. } => bad("path needs k >= 1"),
            _ => Ok(()),
        }
    }
}

/// `grid:RxC`, `rgg:N:RADIUS`, `er:N:P`, `star:LEAVES`, `path:K`, each
/// optionally followed by `:wMAX` for integer weights in `1..=MAX`.
impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParam(format!("cannot parse generator `{s}`"));
        let mut parts: Vec<&str> = s.split(':').collect();
        let mut max_weight = 1;
        if let Some(w) = parts.last().and_then(|p| p.strip_prefix('w')) {
            max_weight = w.parse().map_err(|_| bad())?;
            parts.pop();
        }
        let num = |i: usize| parts.get(i).ok_or_else(bad)?.parse::<usize>().map_err(|_| bad());
        let real = |i: usize| parts.get(i).ok_or_else(bad)?.parse::<f64>().map_err(|_| bad());
        let spec = match (parts[0], parts.len()) {
            ("grid", 2) => {
                let (r, c) = parts[1].split_once('x').ok_or_else(bad)?;
                GraphSpec::grid(r.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?)
            }
            ("rgg", 3) => GraphSpec::random_geometric(num(1)?, real(2)?),
            ("er", 3) => GraphSpec::erdos_renyi(num(1)?, real(2)?),
            ("star", 2) => GraphSpec::star(num(1)?),
            ("path", 2) => GraphSpec::path(num(1)?),
            _ => return Err(bad()),
        };
        Ok(spec.with_max_weight(max_weight))
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphSpec::Grid { rows, cols, .. } => write!(f, "grid:{rows}x{cols}")?,
            GraphSpec::RandomGeometric { n, radius, .. } => write!(f, "rgg:{n}:{radius}")?,
            GraphSpec::ErdosRenyiConnected { n, p, .. } => write!(f, "er:{n}:{p}")?,
            GraphSpec::Star { leaves, .. } => write!(f, "star:{leaves}")?,
            GraphSpec::Path { k, .. } => write!(f, "path:{k}")?,
        }
        match self.max_weight() {
            1 => Ok(()),
            w => write!(f, ":w{w}"),
        }
    }
}

fn weight<R: Rng + ?Sized>(rng: &mut R, max: u32) -> f64 {
    if max == 1 {
        1.0
    } else {
        rng.gen_range(1..=max) as f64
    }
}

pub fn generate_graph<R: Rng + ?Sized>(spec: &GraphSpec, rng: &mut R) -> Result<WeightedGraph> {
    spec.validate()?;
    let w = spec.max_weight();
    match *spec {
        GraphSpec::Grid { rows, cols, .. } => {
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1), weight(rng, w)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c), weight(rng, w)));
                    }
                }
            }
            WeightedGraph::from_edges(rows * cols, edges)
        }
        GraphSpec::Star { leaves, .. } => {
            let edges: Vec<_> = (1..=leaves).map(|x| (0, x, weight(rng, w))).collect();
            WeightedGraph::from_edges(leaves + 1, edges)
        }
        GraphSpec::Path { k, .. } => {
            let edges: Vec<_> = (1..k).map(|x| (x - 1, x, weight(rng, w))).collect();
            WeightedGraph::from_edges(k, edges)
        }
        GraphSpec::ErdosRenyiConnected { n, p, .. } => retry_connected(|| {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v, weight(rng, w)));
                    }
                }
            }
            WeightedGraph::from_edges(n, edges)
        }),
        GraphSpec::RandomGeometric { n, radius, .. } => retry_connected(|| {
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    let (dx, dy) = (pts[u].0 - pts[v].0, pts[u].1 - pts[v].1);
                    if dx * dx + dy * dy <= radius * radius {
                        edges.push((u, v, weight(rng, w)));
                    }
                }
            }
            WeightedGraph::from_edges(n, edges)
        }),
    }
}

fn retry_connected(mut attempt: impl FnMut() -> Result<WeightedGraph>) -> Result<WeightedGraph> {
    for _ in 0..GENERATOR_RETRIES {
        match attempt() {
            Err(Error::Disconnected { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::ResampleBudget { what: "connected random graph", budget: GENERATOR_RETRIES })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, Substreams};
    use crate::sssp::sssp_exact;

    fn rng() -> rand_chacha::ChaCha8Rng {
        Substreams::new(1).stream(Purpose::Generator, 0, 0)
    }

    #[test]
    fn grid_2x2() {
        let g = generate_graph(&GraphSpec::grid(2, 2), &mut rng()).unwrap();
        assert_eq!((g.n(), g.m()), (4, 4));
    }

    #[test]
    fn path_5() {
        let g = generate_graph(&GraphSpec::path(5), &mut rng()).unwrap();
        assert_eq!((g.n(), g.m()), (5, 4));
        let far = sssp_exact(&g, &[(0, 0.0)]).unwrap().dist.into_iter().fold(0.0, f64::max);
        assert_eq!(far, 4.0);
    }

    #[test]
    fn erdos_renyi_is_connected() {
        let g = generate_graph(&GraphSpec::erdos_renyi(64, 0.1), &mut rng()).unwrap();
        assert_eq!(g.n(), 64);
        assert!(sssp_exact(&g, &[(0, 0.0)]).unwrap().dist.iter().all(|d| d.is_finite()));
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["grid:8x8", "rgg:32:0.3", "er:64:0.1", "star:4", "path:5:w16"] {
            assert_eq!(s.parse::<GraphSpec>().unwrap().to_string(), s);
        }
        assert!("grid:8".parse::<GraphSpec>().is_err());
        assert!("er:0:0.5".parse::<GraphSpec>().map(|s| s.validate()).unwrap().is_err());
    }

    #[test]
    fn weights_in_range() {
        let g = generate_graph(&GraphSpec::grid(4, 4).with_max_weight(8), &mut rng()).unwrap();
        assert!(g.edges().iter().all(|e| (1.0..=8.0).contains(&e.w) && e.w.fract() == 0.0));
    }
}
