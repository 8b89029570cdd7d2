//! Single-scale random-shift decompositions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Clustering;
use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};
use crate::rng::{check_scale, sample_capped_shifts, ShiftVector};
use crate::sssp::{approx_le, sssp_approx, sssp_exact, SsspResult};

/// Which decomposition routine builds the intermediate levels.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Mode {
    /// Exact shortest paths; every level is a partition.
    #[default]
    Exact,
    /// Approximate shortest paths plus Blur; levels are subpartitions.
    /// `eps = None` selects [`default_eps`].
    Approximate { eps: Option<f64> },
}

impl Mode {
    pub fn approximate() -> Self {
        Mode::Approximate { eps: None }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Mode::Exact)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Approximate { .. } => "approx",
        }
    }
}

/// `1 / (40 ln n)`.
pub fn default_eps(n: usize) -> f64 {
    // n = 1 never blurs; clamp so the value stays finite.
    1.0 / (40.0 * (n.max(2) as f64).ln())
}

fn shifted_sources(shifts: &ShiftVector) -> Vec<(Vertex, f64)> {
    let top = shifts.max();
    shifts
        .values()
        .iter()
        .enumerate()
        .map(|(u, &d)| (u, top - d))
        .collect()
}

/// Each vertex joins the vertex `u` maximising `delta[u] - dist(u, v)`.
///
/// Runs one shortest-path search from a virtual source attached to every
/// `u` with length `max(delta) - delta[u]`; clusters are the resulting trees.
pub fn random_shift_decompose(
    graph: &WeightedGraph,
    scale: f64,
    shifts: &ShiftVector,
) -> Result<Clustering> {
    check_scale(scale)?;
    if shifts.len() != graph.n() {
        return Err(Error::ShiftLengthMismatch { expected: graph.n(), got: shifts.len() });
    }
    if graph.n() == 0 {
        return Ok(Clustering::singletons(0));
    }
    let tree = sssp_exact(graph, &shifted_sources(shifts))?;
    Ok(Clustering::from_forest(graph, scale, &tree))
}

/// Grows `x` by `ceil(log_{1/eps} scale) + 1` rounds of random-radius balls
/// of geometrically shrinking size.
///
/// Round `i` draws `r` uniformly from `[0, eps^i * scale / 64]` and absorbs
/// every vertex within distance `r` of the current set.
pub fn blur<R: Rng + ?Sized>(
    graph: &WeightedGraph,
    x: &[bool],
    scale: f64,
    eps: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    check_scale(scale)?;
    if x.len() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), got: x.len() });
    }
    if !x.iter().any(|&b| b) || x.iter().all(|&b| b) {
        return Err(Error::InvalidBlurSet);
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParam(format!("blur eps must lie in (0, 1), got {eps}")));
    }
    let mut grown = x.to_vec();
    for i in 0..blur_rounds(scale, eps) {
        let radius = rng.gen::<f64>() * eps.powi(i as i32) * scale / 64.0;
        // Edge weights are at least 1, so a smaller ball adds nothing.
        if radius < 1.0 {
            continue;
        }
        let sources: Vec<(Vertex, f64)> = (0..graph.n())
            .filter(|&v| grown[v])
            .map(|v| (v, 0.0))
            .collect();
        let tree = sssp_approx(graph, &sources, eps * eps)?;
        for (v, &d) in tree.dist.iter().enumerate() {
            if approx_le(d, radius) {
                grown[v] = true;
            }
        }
    }
    Ok(grown)
}

/// Number of Blur rounds, `ceil(log_{1/eps} scale) + 1`.
pub fn blur_rounds(scale: f64, eps: f64) -> usize {
    let log = scale.ln() / (1.0 / eps).ln();
    log.ceil().max(0.0) as usize + 1
}

/// Upper bound on the total Blur radius, `sum_i eps^i * scale / 64`.
pub fn blur_radius_bound(scale: f64, eps: f64) -> f64 {
    (0..blur_rounds(scale, eps))
        .map(|i| eps.powi(i as i32) * scale / 64.0)
        .sum()
}

/// Approximate-SSSP random-shift decomposition with Blur-shrunk clusters.
///
/// Shifts are drawn (with the `9 * scale * ln n` cap) from `rng`, the
/// tentative clusters come from a `(1 + eps)`-approximate search, and each
/// cluster then loses whatever Blur of its complement swallows.
pub fn approx_random_shift_decompose<R: Rng + ?Sized>(
    graph: &WeightedGraph,
    scale: f64,
    eps: Option<f64>,
    rng: &mut R,
) -> Result<Clustering> {
    check_scale(scale)?;
    let n = graph.n();
    let eps = eps.unwrap_or_else(|| default_eps(n));
    let shifts = sample_capped_shifts(rng, n, scale)?;
    if n == 0 {
        return Ok(Clustering::singletons(0));
    }
    let tree: SsspResult = sssp_approx(graph, &shifted_sources(&shifts), eps)?;
    let tentative = Clustering::from_forest(graph, scale, &tree);
    shrink_by_blur(graph, tentative, eps, rng)
}

fn shrink_by_blur<R: Rng + ?Sized>(
    graph: &WeightedGraph,
    mut c: Clustering,
    eps: f64,
    rng: &mut R,
) -> Result<Clustering> {
    let n = graph.n();
    for members in c.members() {
        if members.len() == n {
            continue;
        }
        let mut outside = vec![true; n];
        for &v in &members {
            outside[v] = false;
        }
        let grown = blur(graph, &outside, c.scale, eps, rng)?;
        for &v in &members {
            if grown[v] {
                c.assignment[v] = None;
            }
        }
    }
    // Drop emptied clusters and renumber by increasing center.
    let mut alive = vec![false; c.centers.len()];
    for id in c.assignment.iter().flatten() {
        alive[*id] = true;
    }
    let mut remap = vec![usize::MAX; c.centers.len()];
    let mut centers = Vec::new();
    for (id, &u) in c.centers.iter().enumerate() {
        if alive[id] {
            remap[id] = centers.len();
            centers.push(u);
        }
    }
    for a in c.assignment.iter_mut() {
        *a = a.map(|id| remap[id]);
    }
    c.centers = centers;
    Ok(c)
}

/// One decomposition at `scale` using the routine selected by `mode`.
pub fn decompose<R: Rng + ?Sized>(
    graph: &WeightedGraph,
    scale: f64,
    mode: Mode,
    rng: &mut R,
) -> Result<Clustering> {
    match mode {
        Mode::Exact => {
            let shifts = sample_capped_shifts(rng, graph.n(), scale)?;
            random_shift_decompose(graph, scale, &shifts)
        }
        Mode::Approximate { eps } => approx_random_shift_decompose(graph, scale, eps, rng),
    }
}
