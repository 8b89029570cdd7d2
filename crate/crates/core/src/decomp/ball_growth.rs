use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};
use crate::sssp::{approx_le, sssp_exact};

/// The deterministic ball-growing sequence around one vertex.
///
/// `r[0] = 1` and `r[l] = r[l-1] / 2 + delta[l] + 2`, where `delta[l]` is the
/// largest integer `x` with
/// `|B(v, (r[l-1]/2 + x + 2) 2^l)| >= e^(x/2) |B(v, r[l-1] 2^(l-1))|`.
/// All `r` values are dyadic rationals and therefore exact in `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallGrowthProfile {
    pub vertex: Vertex,
    /// `r[0..=L]`.
    pub r: Vec<f64>,
    /// `delta[1..=L]`; `delta[0]` is unused and zero.
    pub delta: Vec<u32>,
}

impl BallGrowthProfile {
    pub fn delta_sum(&self) -> u64 {
        self.delta.iter().map(|&d| d as u64).sum()
    }

    pub fn r_sum(&self) -> f64 {
        self.r.iter().sum()
    }

    /// Whether `r[l] == r[l-1]/2 + delta[l] + 2` holds bit-exactly for all `l >= 1`.
    pub fn recurrence_holds(&self) -> bool {
        self.r[0] == 1.0
            && (1..self.r.len()).all(|l| self.r[l] == self.r[l - 1] / 2.0 + self.delta[l] as f64 + 2.0)
    }
}

/// Sorted distances from a vertex, for closed-ball counts.
struct Balls(Vec<f64>);

impl Balls {
    fn count(&self, radius: f64) -> usize {
        self.0.partition_point(|&d| approx_le(d, radius))
    }
}

pub fn ball_growth_profile(graph: &WeightedGraph, v: Vertex) -> Result<BallGrowthProfile> {
    if v >= graph.n() {
        return Err(Error::UnknownVertex(v));
    }
    let mut dist = sssp_exact(graph, &[(v, 0.0)])?.dist;
    dist.sort_by(f64::total_cmp);
    let balls = Balls(dist);
    let top = graph.level_count();
    // The inequality forces e^(x/2) <= n, so x never exceeds 2 ln n.
    let max_xi = (2.0 * (graph.n() as f64).ln()).ceil() as u32;

    let mut r = vec![1.0];
    let mut delta = vec![0];
    for l in 1..=top {
        let prev = r[l - 1];
        let scale = 2f64.powi(l as i32);
        let inner = balls.count(prev * scale / 2.0) as f64;
        let best = (0..=max_xi)
            .filter(|&x| {
                let outer = balls.count((prev / 2.0 + x as f64 + 2.0) * scale) as f64;
                outer >= (x as f64 / 2.0).exp() * inner
            })
            .max()
            .expect("x = 0 always satisfies the growth inequality");
        delta.push(best);
        r.push(prev / 2.0 + best as f64 + 2.0);
    }
    Ok(BallGrowthProfile { vertex: v, r, delta })
}
