use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embed::sample_tree;
use crate::decomp::Mode;
use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};
use crate::rng::{Purpose, Substreams};
use crate::sssp::{approx_le, sssp_exact, DistanceCache};

/// Graphs up to this size are measured on every pair.
pub const ALL_PAIRS_MAX_N: usize = 256;
const SAMPLED_PAIRS: usize = 4096;
// Trials per parallel work item; fixed so sums do not depend on thread count.
const CHUNK: u64 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StretchReport {
    pub n: usize,
    pub trials: u64,
    pub pairs: usize,
    pub all_pairs: bool,
    /// Largest per-pair mean of `dist_T / dist_G`.
    pub max_mean_stretch: f64,
    pub worst_pair: (Vertex, Vertex),
    /// Average over pairs of the per-pair mean stretch.
    pub avg_mean_stretch: f64,
    /// Smallest single-tree stretch seen on any pair.
    pub min_stretch: f64,
    pub dominance_violations: u64,
}

impl StretchReport {
    /// `max_mean_stretch / ln n` (0 when `n < 2`).
    pub fn measured_constant(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.max_mean_stretch / (self.n as f64).ln()
        }
    }
}

fn pairs_for(graph: &WeightedGraph, streams: &Substreams) -> (Vec<(Vertex, Vertex)>, bool) {
    let n = graph.n();
    if n <= ALL_PAIRS_MAX_N {
        let all = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        return (all, true);
    }
    let mut rng = streams.stream(Purpose::Pairs, 0, 0);
    let sampled = (0..SAMPLED_PAIRS)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            (u.min(v), u.max(v))
        })
        .collect();
    (sampled, false)
}

#[derive(Clone)]
struct Acc {
    sum: Vec<f64>,
    min: f64,
    violations: u64,
}

pub fn stretch_stats(
    graph: &WeightedGraph,
    trials: u64,
    mode: Mode,
    streams: &Substreams,
) -> Result<StretchReport> {
    if trials == 0 {
        return Err(Error::InvalidParam("trials must be at least 1".into()));
    }
    let n = graph.n();
    let (pairs, all_pairs) = pairs_for(graph, streams);
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; n];
    for &(u, _) in &pairs {
        if rows[u].is_none() {
            rows[u] = Some(sssp_exact(graph, &[(u, 0.0)])?.dist);
        }
    }
    let dist_g: Vec<f64> = pairs
        .iter()
        .map(|&(u, v)| rows[u].as_ref().expect("row computed")[v])
        .collect();

    let chunks: Vec<u64> = (0..trials.div_ceil(CHUNK)).collect();
    let partial = chunks
        .par_iter()
        .map(|&chunk| -> Result<Acc> {
            let mut cache = DistanceCache::new(graph);
            let mut acc = Acc { sum: vec![0.0; pairs.len()], min: f64::INFINITY, violations: 0 };
            for copy in chunk * CHUNK..((chunk + 1) * CHUNK).min(trials) {
                let t = sample_tree(graph, mode, streams, copy, &mut cache)?;
                for (i, &(u, v)) in pairs.iter().enumerate() {
                    let dt = t.leaf_distance(u, v);
                    if !approx_le(dist_g[i], dt) {
                        acc.violations += 1;
                    }
                    let s = dt / dist_g[i];
                    acc.sum[i] += s;
                    acc.min = acc.min.min(s);
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = Acc { sum: vec![0.0; pairs.len()], min: f64::INFINITY, violations: 0 };
    for acc in partial {
        for (t, s) in total.sum.iter_mut().zip(&acc.sum) {
            *t += s;
        }
        total.min = total.min.min(acc.min);
        total.violations += acc.violations;
    }
    let means: Vec<f64> = total.sum.iter().map(|s| s / trials as f64).collect();
    let (worst, max_mean) = means
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (i, &m)| if m > best.1 { (i, m) } else { best });
    let avg = if means.is_empty() { 0.0 } else { means.iter().sum::<f64>() / means.len() as f64 };
    Ok(StretchReport {
        n,
        trials,
        pairs: pairs.len(),
        all_pairs,
        max_mean_stretch: max_mean,
        worst_pair: pairs.get(worst).copied().unwrap_or((0, 0)),
        avg_mean_stretch: avg,
        min_stretch: if total.min.is_finite() { total.min } else { 1.0 },
        dominance_violations: total.violations,
    })
}
