//! Monte Carlo estimators over independent substreams.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomp::{approx_random_shift_decompose, build_hierarchy, decompose, Mode};
use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};
use crate::rng::{Purpose, Substreams};
use crate::sssp::{approx_le, sssp_exact};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationEstimate {
    pub u: Vertex,
    pub v: Vertex,
    pub level: usize,
    pub dist: f64,
    pub trials: u64,
    pub separated: u64,
    pub probability: f64,
    /// `3 sqrt(p (1 - p) / trials)` at the empirical `p`.
    pub band: f64,
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParam("trials must be at least 1".into()));
    }
    Ok(())
}

fn check_vertex(graph: &WeightedGraph, v: Vertex) -> Result<()> {
    if v >= graph.n() {
        return Err(Error::UnknownVertex(v));
    }
    Ok(())
}

pub fn binomial_band(p: f64, trials: u64) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// How often one decomposition at scale `2^level` puts `u` and `v` in
/// different clusters. Assignments are compared as given, so in approximate
/// mode two unclustered endpoints count as together.
/// Trial `t` uses substream `(Decomposition, level, t)`.
pub fn estimate_separation(
    graph: &WeightedGraph,
    u: Vertex,
    v: Vertex,
    level: usize,
    trials: u64,
    mode: Mode,
    streams: &Substreams,
) -> Result<SeparationEstimate> {
    check_trials(trials)?;
    check_vertex(graph, u)?;
    check_vertex(graph, v)?;
    if u == v {
        return Err(Error::InvalidParam("separation needs u != v".into()));
    }
    let scale = 2f64.powi(level as i32);
    let separated = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let mut rng = streams.stream(Purpose::Decomposition, level, t);
            let c = decompose(graph, scale, mode, &mut rng)?;
            let (a, b) = (c.assignment[u], c.assignment[v]);
            Ok(u64::from(a != b))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let probability = separated as f64 / trials as f64;
    Ok(SeparationEstimate {
        u,
        v,
        level,
        dist: sssp_exact(graph, &[(u, 0.0)])?.dist[v],
        trials,
        separated,
        probability,
        band: binomial_band(probability, trials),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub trials: u64,
    pub mean: f64,
    pub std_dev: f64,
    pub max: f64,
    /// `3 std_dev / sqrt(trials)`.
    pub band: f64,
}

impl MeanEstimate {
    fn from_samples(samples: &[f64]) -> Self {
        let k = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / k;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        MeanEstimate {
            trials: samples.len() as u64,
            mean,
            std_dev: var.sqrt(),
            max: samples.iter().copied().fold(0.0, f64::max),
            band: 3.0 * (var / k).sqrt(),
        }
    }
}

/// Mean over hierarchies of `sum_l centerDist_l(v) / 2^l`, summing only the
/// levels where `v` is clustered. Hierarchy `t` is substream copy `t`.
pub fn estimate_center_sum(
    graph: &WeightedGraph,
    v: Vertex,
    trials: u64,
    mode: Mode,
    streams: &Substreams,
) -> Result<MeanEstimate> {
    check_trials(trials)?;
    check_vertex(graph, v)?;
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let h = build_hierarchy(graph, mode, streams, t)?;
            Ok(h.levels
                .iter()
                .filter(|c| c.is_clustered(v))
                .map(|c| c.center_dist[v] / c.scale)
                .sum())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeanEstimate::from_samples(&samples))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteredEstimate {
    pub v: Vertex,
    pub scale: f64,
    pub trials: u64,
    /// Fraction of decompositions in which `v` is clustered.
    pub clustered: f64,
    /// Fraction in which all of `B(v, scale / 8)` lies in `v`'s cluster.
    pub contained: f64,
}

/// Per-vertex clustering and ball-containment frequencies of the approximate
/// decomposition at `scale`. Trial `t` uses substream `(Decomposition, 0, t)`.
pub fn estimate_clustered(
    graph: &WeightedGraph,
    scale: f64,
    eps: Option<f64>,
    trials: u64,
    streams: &Substreams,
) -> Result<Vec<ClusteredEstimate>> {
    check_trials(trials)?;
    let n = graph.n();
    let balls = (0..n)
        .map(|v| {
            let dist = sssp_exact(graph, &[(v, 0.0)])?.dist;
            Ok((0..n).filter(|&x| approx_le(dist[x], scale / 8.0)).collect::<Vec<Vertex>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let zero = || vec![(0u64, 0u64); n];
    let counts = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<(u64, u64)>> {
            let mut rng = streams.stream(Purpose::Decomposition, 0, t);
            let c = approx_random_shift_decompose(graph, scale, eps, &mut rng)?;
            Ok((0..n)
                .map(|v| {
                    let own = c.assignment[v];
                    let inside = own.is_some() && balls[v].iter().all(|&x| c.assignment[x] == own);
                    (u64::from(own.is_some()), u64::from(inside))
                })
                .collect())
        })
        .try_reduce(zero, |a, b| Ok(a.iter().zip(&b).map(|(x, y)| (x.0 + y.0, x.1 + y.1)).collect()))?;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(v, (c, i))| ClusteredEstimate {
            v,
            scale,
            trials,
            clustered: c as f64 / trials as f64,
            contained: i as f64 / trials as f64,
        })
        .collect())
}
