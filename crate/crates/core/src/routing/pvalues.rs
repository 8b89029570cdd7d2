use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::decomp::Clustering;
use crate::graph::WeightedGraph;

/// Distances to the cluster boundary and the resulting `p` values of one
/// clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValues {
    /// `d(v, V \ C)` for the cluster `C` holding `v`; infinite when `C = V`,
    /// zero for unclustered vertices. Infinite entries serialize as `null`.
    #[serde(with = "inf_as_null")]
    pub boundary: Vec<f64>,
    /// `min(1, boundary / 2^l)`; zero for unclustered vertices.
    pub p: Vec<f64>,
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let opt: Vec<Option<f64>> = v.iter().map(|&x| x.is_finite().then_some(x)).collect();
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let opt = Vec::<Option<f64>>::deserialize(d)?;
        Ok(opt.into_iter().map(|x| x.unwrap_or(f64::INFINITY)).collect())
    }
}

struct Item(f64, usize);

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// One search for all clusters at once: every vertex with an edge leaving its
/// cluster is seeded with its lightest such edge, and edges are relaxed only
/// inside a cluster. A shortest path to the outside stays inside `C` until
/// its last hop, so this yields the exact boundary distance.
pub fn compute_p_values(graph: &WeightedGraph, clustering: &Clustering, level: usize) -> PValues {
    let n = graph.n();
    let scale = 2f64.powi(level as i32);
    let cluster = &clustering.assignment;
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for v in 0..n {
        if cluster[v].is_none() {
            continue;
        }
        let exit = graph
            .neighbors(v)
            .iter()
            .filter(|&&(x, _)| cluster[x] != cluster[v])
            .map(|&(_, e)| graph.edge(e).w)
            .fold(f64::INFINITY, f64::min);
        if exit.is_finite() {
            dist[v] = exit;
            heap.push(Reverse(Item(exit, v)));
        }
    }
    while let Some(Reverse(Item(d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(x, e) in graph.neighbors(v) {
            if cluster[x] != cluster[v] {
                continue;
            }
            let nd = d + graph.edge(e).w;
            if nd < dist[x] {
                dist[x] = nd;
                heap.push(Reverse(Item(nd, x)));
            }
        }
    }
    let mut boundary = dist;
    let mut p = vec![0.0; n];
    for v in 0..n {
        if cluster[v].is_none() {
            boundary[v] = 0.0;
        } else {
            p[v] = (boundary[v] / scale).min(1.0);
        }
    }
    PValues { boundary, p }
}
