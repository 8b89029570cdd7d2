//! The factored routing operator `A = B C`.
//!
//! `C` maps a demand to coefficients on dyadic segments of heavy paths and
//! `B` expands each segment into its signed edges. Column `v` of `A` is a
//! unit flow from `v` to the root that climbs the levels: at level `l` its
//! mass sits on the centers of the clusters holding `v`, split in proportion
//! to `p`, and moves to the level-`l + 1` centers through a witness vertex.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flow::{Demand, Flow};
use super::paths::{PathCollection, Segment};
use super::pvalues::{compute_p_values, PValues};
use crate::decomp::{decompose_capped, Clustering, Mode, ROOT};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Vertex, WeightedGraph};
use crate::rng::{Purpose, Substreams, RESAMPLE_BUDGET};

pub const FORMAT_VERSION: u32 = 1;
/// Coefficients smaller than this in magnitude are dropped from `C`.
pub const PRUNE_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogBase {
    #[default]
    Ln,
    Lg,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RoutingConfig {
    pub mode: Mode,
    pub log_base: LogBase,
}

/// Decomposition copies per intermediate level, `ceil(36 log n)`.
pub fn copy_count(n: usize, base: LogBase) -> usize {
    if n < 2 {
        return 1;
    }
    let log = match base {
        LogBase::Ln => (n as f64).ln(),
        LogBase::Lg => (n as f64).log2(),
    };
    (36.0 * log).ceil() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCopy {
    pub clustering: Clustering,
    pub p: PValues,
}

/// All copies of one level.
///
/// Levels 0 and `L` have a single deterministic clustering, so their `Dcnt`
/// identical copies are stored once with `multiplicity = Dcnt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingLevel {
    pub level: usize,
    pub multiplicity: usize,
    pub copies: Vec<LevelCopy>,
    /// `w_l(v) = sum_{d, C} p_{l,d,C}(v)` over all `Dcnt` copies.
    pub w: Vec<f64>,
    /// Redraws needed to meet the `w` bounds (0 when the first draw passed).
    pub resamples: u32,
}

impl RoutingLevel {
    fn new(level: usize, multiplicity: usize, copies: Vec<LevelCopy>, resamples: u32) -> Self {
        let n = copies[0].p.p.len();
        let w = (0..n)
            .map(|v| multiplicity as f64 * copies.iter().map(|c| c.p.p[v]).sum::<f64>())
            .collect();
        RoutingLevel { level, multiplicity, copies, w, resamples }
    }

    /// Fraction of `v`'s mass carried by stored copy `d`: `mult * p / w`.
    pub fn share(&self, d: usize, v: Vertex) -> f64 {
        let p = self.copies[d].p.p[v];
        if p == 0.0 {
            0.0
        } else {
            self.multiplicity as f64 * p / self.w[v]
        }
    }

    fn w_within(&self, dcnt: usize) -> bool {
        let (lo, hi) = (dcnt as f64 / 16.0, dcnt as f64);
        self.w.iter().all(|&w| w >= lo && w <= hi * (1.0 + 1e-12))
    }
}

/// `B`: segment id to signed edges. A sign of `+1` means the segment,
/// traversed away from its forest root, crosses the edge from its lower to
/// its higher endpoint.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SegmentStore {
    ptr: Vec<usize>,
    edges: Vec<EdgeId>,
    signs: Vec<i8>,
}

impl SegmentStore {
    fn push(&mut self, items: impl Iterator<Item = (EdgeId, i8)>) -> u32 {
        if self.ptr.is_empty() {
            self.ptr.push(0);
        }
        for (e, s) in items {
            self.edges.push(e);
            self.signs.push(s);
        }
        self.ptr.push(self.edges.len());
        (self.ptr.len() - 2) as u32
    }

    pub fn len(&self) -> usize {
        self.ptr.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges_of(&self, s: usize) -> impl Iterator<Item = (EdgeId, i8)> + '_ {
        let r = self.ptr[s]..self.ptr[s + 1];
        self.edges[r.clone()].iter().copied().zip(self.signs[r].iter().copied())
    }

    pub fn total_len(&self) -> usize {
        self.edges.len()
    }
}

/// `C` in compressed-column form: column `v` lists `(segment, coefficient)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseColumns {
    ptr: Vec<usize>,
    seg: Vec<u32>,
    coef: Vec<f64>,
}

impl SparseColumns {
    fn from_columns(cols: Vec<Vec<(u32, f64)>>) -> Self {
        let mut out = SparseColumns { ptr: vec![0], ..Default::default() };
        for col in cols {
            for (s, c) in col {
                out.seg.push(s);
                out.coef.push(c);
            }
            out.ptr.push(out.seg.len());
        }
        out
    }

    pub fn column(&self, v: Vertex) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.ptr[v]..self.ptr[v + 1];
        self.seg[r.clone()].iter().map(|&s| s as usize).zip(self.coef[r].iter().copied())
    }

    pub fn nnz(&self) -> usize {
        self.seg.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoutingOperator {
    pub version: u32,
    pub graph_hash: String,
    pub n: usize,
    pub m: usize,
    /// `L`.
    pub top: usize,
    pub dcnt: usize,
    pub config: RoutingConfig,
    pub seed: u64,
    pub levels: Vec<RoutingLevel>,
    pub segments: SegmentStore,
    pub columns: SparseColumns,
}

/// Heavy paths and root-path segment lists of every stored copy; only needed
/// while building or verifying.
pub(crate) struct Skeleton {
    pub paths: Vec<Vec<PathCollection>>,
}

impl Skeleton {
    pub fn new(levels: &[RoutingLevel]) -> Self {
        let paths = levels
            .iter()
            .map(|lvl| {
                lvl.copies
                    .iter()
                    .map(|c| PathCollection::from_forest(&c.clustering.parent))
                    .collect()
            })
            .collect();
        Skeleton { paths }
    }
}

/// Witness of each `(C, C')` pair for copies `lo` (level `l`) and `hi`
/// (level `l + 1`): the vertex of `C ∩ C'` with positive coefficient that
/// minimises the summed forest distances to both centers, ties to the
/// smaller id.
pub(crate) fn witness_map(lo: &LevelCopy, hi: &LevelCopy) -> HashMap<(usize, usize), (f64, Vertex)> {
    let mut best: HashMap<(usize, usize), (f64, Vertex)> = HashMap::new();
    let n = lo.p.p.len();
    for w in 0..n {
        let Some(key) = support_key(lo, hi, w) else { continue };
        let score = lo.clustering.center_dist[w] + hi.clustering.center_dist[w];
        best.entry(key)
            .and_modify(|b| {
                if score < b.0 {
                    *b = (score, w);
                }
            })
            .or_insert((score, w));
    }
    best
}

pub(crate) fn support_key(lo: &LevelCopy, hi: &LevelCopy, w: Vertex) -> Option<(usize, usize)> {
    if lo.p.p[w] > 0.0 && hi.p.p[w] > 0.0 {
        Some((lo.clustering.assignment[w]?, hi.clustering.assignment[w]?))
    } else {
        None
    }
}

fn build_copies(
    graph: &WeightedGraph,
    config: &RoutingConfig,
    streams: &Substreams,
    level: usize,
    dcnt: usize,
    top: usize,
) -> Result<RoutingLevel> {
    let n = graph.n();
    let scale = 2f64.powi(level as i32);
    if level == 0 || level == top {
        let c = if level == 0 {
            Clustering::singletons(n)
        } else {
            Clustering::whole(graph, ROOT, scale)?
        };
        let p = compute_p_values(graph, &c, level);
        return Ok(RoutingLevel::new(level, dcnt, vec![LevelCopy { clustering: c, p }], 0));
    }
    for attempt in 0..RESAMPLE_BUDGET {
        let copies = (0..dcnt)
            .into_par_iter()
            .map(|d| {
                let copy = attempt as u64 * dcnt as u64 + d as u64;
                let mut rng = streams.stream(Purpose::Routing, level, copy);
                let c = decompose_capped(graph, scale, level, config.mode, &mut rng)?;
                let p = compute_p_values(graph, &c, level);
                Ok(LevelCopy { clustering: c, p })
            })
            .collect::<Result<Vec<_>>>()?;
        let lvl = RoutingLevel::new(level, 1, copies, attempt as u32);
        if lvl.w_within(dcnt) {
            return Ok(lvl);
        }
    }
    Err(Error::ResampleBudget { what: "w_l bounds", budget: RESAMPLE_BUDGET })
}

pub fn build_routing_operator(
    graph: &WeightedGraph,
    config: RoutingConfig,
    streams: &Substreams,
) -> Result<RoutingOperator> {
    let n = graph.n();
    let top = graph.level_count();
    let dcnt = copy_count(n, config.log_base);
    let levels = (0..=top)
        .map(|l| build_copies(graph, &config, streams, l, dcnt, top))
        .collect::<Result<Vec<_>>>()?;
    let skeleton = Skeleton::new(&levels);

    // Intern the root-path segments of every vertex with positive p.
    let mut segments = SegmentStore::default();
    let mut ids: HashMap<(usize, usize, Segment), u32> = HashMap::new();
    let mut root_segs: Vec<Vec<Vec<Vec<u32>>>> = Vec::with_capacity(levels.len());
    for (l, lvl) in levels.iter().enumerate() {
        let mut per_copy = Vec::with_capacity(lvl.copies.len());
        for (d, copy) in lvl.copies.iter().enumerate() {
            let pc = &skeleton.paths[l][d];
            let per_vertex = (0..n)
                .map(|w| {
                    if copy.p.p[w] == 0.0 {
                        return Vec::new();
                    }
                    pc.decompose_root_path(w)
                        .into_iter()
                        .map(|s| {
                            *ids.entry((l, d, s)).or_insert_with(|| {
                                segments.push(pc.segment_edges(s).map(|(a, b)| {
                                    let e = graph.edge_between(a, b).expect("forest edges are graph edges");
                                    (e, if a < b { 1 } else { -1 })
                                }))
                            })
                        })
                        .collect()
                })
                .collect::<Vec<Vec<u32>>>();
            per_copy.push(per_vertex);
        }
        root_segs.push(per_copy);
    }

    let nseg = segments.len();
    let mut parts: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for l in 0..top {
        let (lo, hi) = (&levels[l], &levels[l + 1]);
        let kh = hi.copies.len();
        // witness[i * kh + j][v]: witness vertex for v's cluster pair.
        let witness: Vec<Vec<u32>> = (0..lo.copies.len() * kh)
            .into_par_iter()
            .map(|ij| {
                let (a, b) = (&lo.copies[ij / kh], &hi.copies[ij % kh]);
                let best = witness_map(a, b);
                (0..n)
                    .map(|v| support_key(a, b, v).map_or(u32::MAX, |k| best[&k].1 as u32))
                    .collect()
            })
            .collect();
        let contributions: Vec<Vec<(u32, f64)>> = (0..n)
            .into_par_iter()
            .map_init(
                || (vec![0.0f64; nseg], Vec::<u32>::new()),
                |(scratch, touched), v| {
                    for i in 0..lo.copies.len() {
                        let a = lo.share(i, v);
                        if a == 0.0 {
                            continue;
                        }
                        for j in 0..kh {
                            let b = hi.share(j, v);
                            if b == 0.0 {
                                continue;
                            }
                            let f = a * b;
                            let w = witness[i * kh + j][v] as usize;
                            for &s in &root_segs[l][i][w] {
                                if scratch[s as usize] == 0.0 {
                                    touched.push(s);
                                }
                                scratch[s as usize] += f;
                            }
                            for &s in &root_segs[l + 1][j][w] {
                                if scratch[s as usize] == 0.0 {
                                    touched.push(s);
                                }
                                scratch[s as usize] -= f;
                            }
                        }
                    }
                    touched.sort_unstable();
                    touched.dedup();
                    let out = touched.iter().map(|&s| (s, scratch[s as usize])).collect();
                    for &s in touched.iter() {
                        scratch[s as usize] = 0.0;
                    }
                    touched.clear();
                    out
                },
            )
            .collect();
        for (v, c) in contributions.into_iter().enumerate() {
            parts[v].extend(c);
        }
    }
    let columns = parts
        .into_iter()
        .map(|mut col| {
            col.sort_by_key(|&(s, _)| s);
            let mut merged: Vec<(u32, f64)> = Vec::with_capacity(col.len());
            for (s, c) in col {
                match merged.last_mut() {
                    Some(last) if last.0 == s => last.1 += c,
                    _ => merged.push((s, c)),
                }
            }
            merged.retain(|&(_, c)| c.abs() >= PRUNE_TOL);
            merged
        })
        .collect();

    Ok(RoutingOperator {
        version: FORMAT_VERSION,
        graph_hash: graph.content_hash(),
        n,
        m: graph.m(),
        top,
        dcnt,
        config,
        seed: streams.seed(),
        levels,
        segments,
        columns: SparseColumns::from_columns(columns),
    })
}

impl RoutingOperator {
    pub fn check_graph(&self, graph: &WeightedGraph) -> Result<()> {
        if graph.content_hash() != self.graph_hash {
            return Err(Error::InvalidParam("operator was built for a different graph".into()));
        }
        Ok(())
    }

    /// `g = C d`, one coefficient per segment.
    pub fn apply_c(&self, d: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.segments.len()];
        for (v, &x) in d.iter().enumerate() {
            if x != 0.0 {
                for (s, c) in self.columns.column(v) {
                    g[s] += x * c;
                }
            }
        }
        g
    }

    /// `f = B g`.
    pub fn apply_b(&self, g: &[f64]) -> Flow {
        let mut f = vec![0.0; self.m];
        for (s, &x) in g.iter().enumerate() {
            if x != 0.0 {
                for (e, sign) in self.segments.edges_of(s) {
                    f[e] += sign as f64 * x;
                }
            }
        }
        Flow(f)
    }

    /// `A d` for a balanced demand.
    pub fn apply(&self, d: &Demand) -> Result<Flow> {
        if d.0.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: d.0.len() });
        }
        d.check_balanced()?;
        Ok(self.apply_b(&self.apply_c(&d.0)))
    }

    /// `A^T y = C^T (B^T y)`.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.m {
            return Err(Error::LengthMismatch { expected: self.m, got: y.len() });
        }
        let z: Vec<f64> = (0..self.segments.len())
            .map(|s| self.segments.edges_of(s).map(|(e, sign)| sign as f64 * y[e]).sum())
            .collect();
        Ok((0..self.n)
            .map(|v| self.columns.column(v).map(|(s, c)| c * z[s]).sum())
            .collect())
    }

    /// `w_l(v)`.
    pub fn w(&self, level: usize, v: Vertex) -> f64 {
        self.levels[level].w[v]
    }

    /// Redraws spent on the `w` bounds, summed over levels.
    pub fn resamples(&self) -> u32 {
        self.levels.iter().map(|l| l.resamples).sum()
    }
}
