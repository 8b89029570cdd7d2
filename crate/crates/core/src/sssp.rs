//! Multi-source shortest paths with per-source offsets.
//!
//! A binary-heap Dijkstra. Shortest-path trees are made deterministic by
//! breaking ties toward the smallest predecessor id; a source keeps its own
//! offset on a tie (the virtual super-source counts as the smallest id).

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Vertex, WeightedGraph};

/// Relative tolerance used for every distance comparison.
pub const DIST_TOL: f64 = 1e-9;

/// `a` and `b` agree to within `DIST_TOL` scaled by the larger magnitude (at least 1).
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= DIST_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `a <= b` up to [`approx_eq`].
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b || approx_eq(a, b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, Vertex);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsspResult {
    /// Distance from the source set, `INFINITY` where unreachable.
    pub dist: Vec<f64>,
    /// Predecessor in the shortest-path forest; `None` for roots and unreachable vertices.
    pub parent: Vec<Option<Vertex>>,
    pub parent_edge: Vec<Option<EdgeId>>,
    /// The root source whose tree contains the vertex.
    pub origin: Vec<Option<Vertex>>,
    /// Vertices in settle order; parents always precede children.
    pub order: Vec<Vertex>,
    pub sources: Vec<(Vertex, f64)>,
}

impl SsspResult {
    pub fn is_root(&self, v: Vertex) -> bool {
        self.parent[v].is_none() && self.origin[v] == Some(v)
    }

    pub fn reached(&self, v: Vertex) -> bool {
        self.dist[v].is_finite()
    }
}

/// Exact shortest distances `min over (s, o) of o + dist(s, v)`.
pub fn sssp_exact(graph: &WeightedGraph, sources: &[(Vertex, f64)]) -> Result<SsspResult> {
    dijkstra(graph, sources, None)
}

/// `(1 + eps)`-approximate shortest paths.
///
/// Backed by the exact search, which meets the approximation contract and the
/// per-edge smoothness `|d(u) - d(v)| <= 2 w(u, v)` for every `eps >= 0`.
pub fn sssp_approx(graph: &WeightedGraph, sources: &[(Vertex, f64)], eps: f64) -> Result<SsspResult> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParam(format!("eps must be >= 0, got {eps}")));
    }
    dijkstra(graph, sources, None)
}

/// Shortest paths that never leave the vertices with `allowed[v] == true`.
pub fn sssp_restricted(
    graph: &WeightedGraph,
    sources: &[(Vertex, f64)],
    allowed: &[bool],
) -> Result<SsspResult> {
    if allowed.len() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), got: allowed.len() });
    }
    dijkstra(graph, sources, Some(allowed))
}

fn dijkstra(
    graph: &WeightedGraph,
    sources: &[(Vertex, f64)],
    allowed: Option<&[bool]>,
) -> Result<SsspResult> {
    if sources.is_empty() {
        return Err(Error::EmptySources);
    }
    let n = graph.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<Vertex>> = vec![None; n];
    let mut parent_edge: Vec<Option<EdgeId>> = vec![None; n];
    let mut origin: Vec<Option<Vertex>> = vec![None; n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();

    for &(s, off) in sources {
        if s >= n {
            return Err(Error::UnknownVertex(s));
        }
        if !(off.is_finite() && off >= 0.0) {
            return Err(Error::InvalidParam(format!("source offset {off} must be >= 0")));
        }
        if off < dist[s] {
            dist[s] = off;
            origin[s] = Some(s);
        }
    }
    for (s, &d) in dist.iter().enumerate() {
        if d.is_finite() {
            heap.push(Reverse(Key(d, s)));
        }
    }

    while let Some(Reverse(Key(d, x))) = heap.pop() {
        if done[x] || d != dist[x] {
            continue;
        }
        done[x] = true;
        order.push(x);
        for &(y, e) in graph.neighbors(x) {
            if done[y] || allowed.is_some_and(|a| !a[y]) {
                continue;
            }
            let nd = d + graph.edge(e).w;
            let cur = dist[y];
            let take = if !cur.is_finite() {
                true
            } else if approx_eq(nd, cur) {
                // Roots keep their offset; otherwise prefer the smaller predecessor.
                parent[y].is_some_and(|p| x < p)
            } else {
                nd < cur
            };
            if take {
                dist[y] = nd;
                parent[y] = Some(x);
                parent_edge[y] = Some(e);
                origin[y] = origin[x];
                heap.push(Reverse(Key(nd, y)));
            }
        }
    }

    Ok(SsspResult { dist, parent, parent_edge, origin, order, sources: sources.to_vec() })
}

/// Memoised single-source distance vectors.
#[derive(Debug)]
pub struct DistanceCache<'g> {
    graph: &'g WeightedGraph,
    rows: HashMap<Vertex, Vec<f64>>,
}

impl<'g> DistanceCache<'g> {
    pub fn new(graph: &'g WeightedGraph) -> Self {
        DistanceCache { graph, rows: HashMap::new() }
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    pub fn from(&mut self, s: Vertex) -> &[f64] {
        let graph = self.graph;
        self.rows.entry(s).or_insert_with(|| {
            sssp_exact(graph, &[(s, 0.0)])
                .expect("single in-range source")
                .dist
        })
    }

    pub fn dist(&mut self, a: Vertex, b: Vertex) -> f64 {
        self.from(a)[b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> WeightedGraph {
        WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn k2_single_source() {
        let g = WeightedGraph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let r = sssp_exact(&g, &[(0, 0.0)]).unwrap();
        assert_eq!(r.dist, vec![0.0, 1.0]);
        assert_eq!(r.parent, vec![None, Some(0)]);
    }

    #[test]
    fn offsets_compete() {
        let r = sssp_exact(&path3(), &[(0, 0.0), (2, 5.0)]).unwrap();
        assert_eq!(r.dist, vec![0.0, 1.0, 2.0]);
        assert_eq!(r.origin, vec![Some(0); 3]);
        assert!(!r.is_root(2));
    }

    #[test]
    fn duplicate_sources_take_min_offset() {
        let r = sssp_exact(&path3(), &[(1, 3.0), (1, 0.5)]).unwrap();
        assert_eq!(r.dist[1], 0.5);
        assert!(r.is_root(1));
    }

    #[test]
    fn ties_prefer_smaller_predecessor() {
        let r = sssp_exact(&path3(), &[(0, 0.0), (2, 0.0)]).unwrap();
        assert_eq!(r.parent[1], Some(0));
        assert_eq!(r.origin[1], Some(0));
    }

    #[test]
    fn source_keeps_offset_on_tie() {
        let r = sssp_exact(&path3(), &[(0, 0.0), (1, 1.0)]).unwrap();
        assert!(r.is_root(1));
    }

    #[test]
    fn empty_sources_rejected() {
        assert!(matches!(sssp_exact(&path3(), &[]), Err(Error::EmptySources)));
        assert!(matches!(sssp_approx(&path3(), &[], 0.1), Err(Error::EmptySources)));
    }

    #[test]
    fn restriction_blocks_paths() {
        let g = path3();
        let r = sssp_restricted(&g, &[(0, 0.0)], &[true, false, true]).unwrap();
        assert_eq!(r.dist[0], 0.0);
        assert!(!r.reached(1));
        assert!(!r.reached(2));
    }

    #[test]
    fn cache_matches_direct() {
        let g = path3();
        let mut cache = DistanceCache::new(&g);
        assert_eq!(cache.dist(2, 0), 2.0);
        assert_eq!(cache.from(1), &[1.0, 0.0, 1.0]);
    }
}
