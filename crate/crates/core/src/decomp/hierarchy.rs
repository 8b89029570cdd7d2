use serde::{Deserialize, Serialize};

use super::{decompose, Clustering, Mode};
use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};
use crate::rng::{Purpose, Substreams, RESAMPLE_BUDGET};

/// The designated root of the top level.
pub const ROOT: Vertex = 0;

/// Clusterings at scales `2^0 .. 2^L`: singletons at the bottom, `V` at the
/// top, random-shift decompositions in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hierarchy {
    pub mode: Mode,
    pub levels: Vec<Clustering>,
}

impl Hierarchy {
    /// `L`; `levels.len() == L + 1`.
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn n(&self) -> usize {
        self.levels[0].n()
    }
}

/// Distance-to-center cap `2^l * 10 * ln n` enforced on intermediate levels.
pub fn center_dist_cap(n: usize, level: usize) -> f64 {
    2f64.powi(level as i32) * 10.0 * (n.max(2) as f64).ln()
}

/// Builds one level exactly as [`build_hierarchy`] would, from substream
/// `(Hierarchy, level, copy)`.
pub fn build_level(
    graph: &WeightedGraph,
    mode: Mode,
    streams: &Substreams,
    copy: u64,
    level: usize,
) -> Result<Clustering> {
    let top = graph.level_count();
    if level > top {
        return Err(Error::InvalidParam(format!("level {level} exceeds L = {top}")));
    }
    if level == 0 {
        return Ok(Clustering::singletons(graph.n()));
    }
    let scale = 2f64.powi(level as i32);
    if level == top {
        return Clustering::whole(graph, ROOT, scale);
    }
    let mut rng = streams.stream(Purpose::Hierarchy, level, copy);
    decompose_capped(graph, scale, level, mode, &mut rng)
}

/// Decomposes at `2^level`, redrawing until every clustered vertex is within
/// [`center_dist_cap`] of its center.
pub(crate) fn decompose_capped<R: rand::Rng + ?Sized>(
    graph: &WeightedGraph,
    scale: f64,
    level: usize,
    mode: Mode,
    rng: &mut R,
) -> Result<Clustering> {
    let cap = center_dist_cap(graph.n(), level);
    for _ in 0..RESAMPLE_BUDGET {
        let c = decompose(graph, scale, mode, rng)?;
        let ok = (0..graph.n()).all(|v| !c.is_clustered(v) || c.center_dist[v] <= cap);
        if ok {
            return Ok(c);
        }
    }
    Err(Error::ResampleBudget { what: "center distance cap", budget: RESAMPLE_BUDGET })
}

/// A hierarchical random-shift decomposition; each intermediate level uses
/// its own substream so levels are independent.
pub fn build_hierarchy(
    graph: &WeightedGraph,
    mode: Mode,
    streams: &Substreams,
    copy: u64,
) -> Result<Hierarchy> {
    let top = graph.level_count();
    let levels = (0..=top)
        .map(|l| build_level(graph, mode, streams, copy, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(Hierarchy { mode, levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_has_two_levels() {
        let g = WeightedGraph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let h = build_hierarchy(&g, Mode::Exact, &Substreams::new(1), 0).unwrap();
        assert_eq!(h.top(), 1);
        assert_eq!(h.levels[0].cluster_count(), 2);
        assert_eq!(h.levels[1].cluster_count(), 1);
        assert_eq!(h.levels[1].centers, vec![ROOT]);
    }

    #[test]
    fn single_vertex_has_one_level() {
        let g = WeightedGraph::from_edges(1, []).unwrap();
        let h = build_hierarchy(&g, Mode::approximate(), &Substreams::new(1), 0).unwrap();
        assert_eq!(h.top(), 0);
        assert_eq!(h.levels[0].assignment, vec![Some(0)]);
    }

    #[test]
    fn level_rebuild_is_bit_exact() {
        let edges: Vec<_> = (0..15).map(|i| (i, i + 1, 1.0 + (i % 3) as f64)).collect();
        let g = WeightedGraph::from_edges(16, edges).unwrap();
        let s = Substreams::new(77);
        for mode in [Mode::Exact, Mode::approximate()] {
            let h = build_hierarchy(&g, mode, &s, 4).unwrap();
            assert!(h.top() > 3);
            assert_eq!(build_level(&g, mode, &s, 4, 3).unwrap(), h.levels[3]);
            for (l, c) in h.levels.iter().enumerate() {
                assert_eq!(c.scale, 2f64.powi(l as i32));
                c.validate(&g).unwrap();
            }
        }
    }
}
