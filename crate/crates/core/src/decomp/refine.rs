use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Hierarchy;
use crate::graph::{Vertex, WeightedGraph};
use crate::sssp::DistanceCache;

/// Nested partitions `C_{>=0} .. C_{>=L}` with one projected center per
/// cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedHierarchy {
    /// `parts[l][v]`: cluster id of `v` in `C_{>=l}`.
    pub parts: Vec<Vec<usize>>,
    /// `centers[l][id]`: projected center of that cluster.
    pub centers: Vec<Vec<Vertex>>,
    /// `parent_cluster[l][id]`: containing cluster id at level `l + 1` (`l < L`).
    pub parent_cluster: Vec<Vec<usize>>,
}

impl RefinedHierarchy {
    pub fn top(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn cluster_count(&self, level: usize) -> usize {
        self.centers[level].len()
    }

    pub fn center_of(&self, level: usize, v: Vertex) -> Vertex {
        self.centers[level][self.parts[level][v]]
    }
}

/// Coarsest common refinement of `levels[l..=L]` for every `l`, computed top
/// down by splitting each level-`(l+1)` part along the level-`l` clusters.
///
/// A cluster's projected center is its member closest to the underlying
/// level-`l` center (ties to the smaller id). Vertices a subpartition leaves
/// unclustered at level `l` stay grouped per parent part, and that group
/// projects the parent's center instead.
pub fn refine(hierarchy: &Hierarchy, graph: &WeightedGraph) -> RefinedHierarchy {
    let mut cache = DistanceCache::new(graph);
    refine_with(hierarchy, &mut cache)
}

pub fn refine_with(hierarchy: &Hierarchy, cache: &mut DistanceCache<'_>) -> RefinedHierarchy {
    let n = hierarchy.n();
    let top = hierarchy.top();
    let mut parts = vec![Vec::new(); top + 1];
    let mut centers = vec![Vec::new(); top + 1];
    let mut parent_cluster = vec![Vec::new(); top + 1];

    let root_level = &hierarchy.levels[top];
    parts[top] = vec![0; n];
    let root_center = root_level.center_of(0).unwrap_or(0);
    centers[top] = vec![project(cache, &(0..n).collect::<Vec<_>>(), root_center)];

    for l in (0..top).rev() {
        let level = &hierarchy.levels[l];
        let mut ids: HashMap<(usize, Option<usize>), usize> = HashMap::new();
        let mut members: Vec<Vec<Vertex>> = Vec::new();
        let mut keys: Vec<(usize, Option<usize>)> = Vec::new();
        let mut part = vec![0; n];
        for v in 0..n {
            let key = (parts[l + 1][v], level.assignment[v]);
            let id = *ids.entry(key).or_insert_with(|| {
                members.push(Vec::new());
                keys.push(key);
                members.len() - 1
            });
            members[id].push(v);
            part[v] = id;
        }
        let mut level_centers = Vec::with_capacity(members.len());
        for (id, group) in members.iter().enumerate() {
            let (up, cluster) = keys[id];
            let target = match cluster {
                Some(c) => level.centers[c],
                None => centers[l + 1][up],
            };
            level_centers.push(project(cache, group, target));
        }
        parent_cluster[l] = keys.iter().map(|k| k.0).collect();
        parts[l] = part;
        centers[l] = level_centers;
    }

    RefinedHierarchy { parts, centers, parent_cluster }
}

/// `argmin_{r in group} dist(r, target)`, ties to the smaller id.
fn project(cache: &mut DistanceCache<'_>, group: &[Vertex], target: Vertex) -> Vertex {
    let row = cache.from(target);
    let mut best = group[0];
    for &r in &group[1..] {
        if row[r] < row[best] {
            best = r;
        }
    }
    best
}
