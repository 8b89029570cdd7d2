use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};
use crate::sssp::{approx_eq, sssp_exact, SsspResult};

/// One level of a (sub)partition together with the shortest-path forest that
/// produced it.
///
/// The forest is total: every vertex hangs below exactly one forest root.
/// In exact mode the clusters are the forest trees. In approximate mode a
/// cluster is what remains of a tree after its boundary was blurred away, so
/// `assignment` may be partial and a cluster's center (the tree root) may
/// itself be unassigned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ClusteringJson", try_from = "ClusteringJson")]
pub struct Clustering {
    pub scale: f64,
    pub assignment: Vec<Option<usize>>,
    pub centers: Vec<Vertex>,
    pub parent: Vec<Option<Vertex>>,
    pub parent_weight: Vec<f64>,
    /// Forest distance from the vertex to its tree root.
    pub center_dist: Vec<f64>,
    /// Root of the forest tree containing the vertex.
    pub tree_root: Vec<Vertex>,
}

impl Clustering {
    /// Every vertex is its own cluster and center.
    pub fn singletons(n: usize) -> Self {
        Clustering {
            scale: 1.0,
            assignment: (0..n).map(Some).collect(),
            centers: (0..n).collect(),
            parent: vec![None; n],
            parent_weight: vec![0.0; n],
            center_dist: vec![0.0; n],
            tree_root: (0..n).collect(),
        }
    }

    /// The single cluster `V` centered at `root`, spanned by the exact
    /// shortest-path tree from `root`.
    pub fn whole(graph: &WeightedGraph, root: Vertex, scale: f64) -> Result<Self> {
        let tree = sssp_exact(graph, &[(root, 0.0)])?;
        Ok(Self::from_forest(graph, scale, &tree))
    }

    /// Clusters = trees of a shortest-path forest, numbered by increasing root.
    pub(crate) fn from_forest(graph: &WeightedGraph, scale: f64, forest: &SsspResult) -> Self {
        let n = graph.n();
        let mut roots: Vec<Vertex> = (0..n).filter(|&v| forest.parent[v].is_none()).collect();
        roots.sort_unstable();
        let mut id_of = vec![usize::MAX; n];
        for (id, &r) in roots.iter().enumerate() {
            id_of[r] = id;
        }
        let mut parent_weight = vec![0.0; n];
        let mut center_dist = vec![0.0; n];
        let mut tree_root: Vec<Vertex> = (0..n).collect();
        for &v in &forest.order {
            if let (Some(p), Some(e)) = (forest.parent[v], forest.parent_edge[v]) {
                let w = graph.edge(e).w;
                parent_weight[v] = w;
                center_dist[v] = center_dist[p] + w;
                tree_root[v] = tree_root[p];
            }
        }
        Clustering {
            scale,
            assignment: (0..n).map(|v| Some(id_of[tree_root[v]])).collect(),
            centers: roots,
            parent: forest.parent.clone(),
            parent_weight,
            center_dist,
            tree_root,
        }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.centers.len()
    }

    pub fn cluster_of(&self, v: Vertex) -> Option<usize> {
        self.assignment[v]
    }

    pub fn center_of(&self, v: Vertex) -> Option<Vertex> {
        self.assignment[v].map(|c| self.centers[c])
    }

    pub fn is_clustered(&self, v: Vertex) -> bool {
        self.assignment[v].is_some()
    }

    pub fn is_partition(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    pub fn members(&self) -> Vec<Vec<Vertex>> {
        let mut out = vec![Vec::new(); self.centers.len()];
        for (v, a) in self.assignment.iter().enumerate() {
            if let Some(c) = a {
                out[*c].push(v);
            }
        }
        out
    }

    /// Checks the structural invariants against `graph`; returns the first
    /// violation found.
    pub fn validate(&self, graph: &WeightedGraph) -> Result<(), String> {
        let n = graph.n();
        if [
            self.assignment.len(),
            self.parent.len(),
            self.parent_weight.len(),
            self.center_dist.len(),
            self.tree_root.len(),
        ]
        .iter()
        .any(|&len| len != n)
        {
            return Err("field length differs from n".into());
        }
        for (v, p) in self.parent.iter().enumerate() {
            match *p {
                None => {
                    if self.tree_root[v] != v || self.center_dist[v] != 0.0 {
                        return Err(format!("forest root {v} is inconsistent"));
                    }
                }
                Some(p) => {
                    let e = graph
                        .edge_between(v, p)
                        .ok_or_else(|| format!("forest edge {p}-{v} not in graph"))?;
                    if graph.edge(e).w != self.parent_weight[v] {
                        return Err(format!("forest weight mismatch at {v}"));
                    }
                    if self.tree_root[v] != self.tree_root[p] {
                        return Err(format!("forest edge {p}-{v} crosses trees"));
                    }
                    if !approx_eq(self.center_dist[v], self.center_dist[p] + self.parent_weight[v]) {
                        return Err(format!("center_dist at {v} is not a forest distance"));
                    }
                }
            }
        }
        let mut nonempty = vec![false; self.centers.len()];
        for (v, a) in self.assignment.iter().enumerate() {
            if let Some(c) = *a {
                if c >= self.centers.len() {
                    return Err(format!("cluster id {c} out of range"));
                }
                if self.tree_root[v] != self.centers[c] {
                    return Err(format!("vertex {v} is not below its center"));
                }
                nonempty[c] = true;
            }
        }
        if let Some(c) = nonempty.iter().position(|x| !x) {
            return Err(format!("cluster {c} is empty"));
        }
        for (c, &u) in self.centers.iter().enumerate() {
            if self.parent[u].is_some() {
                return Err(format!("center {u} of cluster {c} is not a forest root"));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ForestJson {
    parent: Vec<Option<Vertex>>,
    weight: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ClusteringJson {
    scale: f64,
    assignment: Vec<Option<usize>>,
    centers: BTreeMap<usize, Vertex>,
    forest: ForestJson,
}

impl From<Clustering> for ClusteringJson {
    fn from(c: Clustering) -> Self {
        ClusteringJson {
            scale: c.scale,
            assignment: c.assignment,
            centers: c.centers.into_iter().enumerate().collect(),
            forest: ForestJson { parent: c.parent, weight: c.parent_weight },
        }
    }
}

impl TryFrom<ClusteringJson> for Clustering {
    type Error = Error;

    fn try_from(j: ClusteringJson) -> Result<Self> {
        let n = j.assignment.len();
        if j.forest.parent.len() != n || j.forest.weight.len() != n {
            return Err(Error::InvalidParam("forest arrays must have length n".into()));
        }
        let centers: Vec<Vertex> = j.centers.values().copied().collect();
        if j.centers.keys().copied().ne(0..centers.len()) {
            return Err(Error::InvalidParam("cluster ids must be 0..k".into()));
        }
        // Recover root and root distance by walking parents with memoisation.
        let mut tree_root: Vec<Option<Vertex>> = vec![None; n];
        let mut center_dist = vec![0.0; n];
        for start in 0..n {
            let mut chain = Vec::new();
            let mut x = start;
            while tree_root[x].is_none() {
                match j.forest.parent[x] {
                    None => {
                        tree_root[x] = Some(x);
                        break;
                    }
                    Some(p) => {
                        if p >= n || chain.len() > n {
                            return Err(Error::InvalidParam("forest parent pointers are invalid".into()));
                        }
                        chain.push(x);
                        x = p;
                    }
                }
            }
            while let Some(y) = chain.pop() {
                let p = j.forest.parent[y].expect("chain vertices have parents");
                tree_root[y] = tree_root[p];
                center_dist[y] = center_dist[p] + j.forest.weight[y];
            }
        }
        Ok(Clustering {
            scale: j.scale,
            assignment: j.assignment,
            centers,
            parent: j.forest.parent,
            parent_weight: j.forest.weight,
            center_dist,
            tree_root: tree_root.into_iter().map(|r| r.expect("every vertex resolved")).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singletons_and_whole_are_valid() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let s = Clustering::singletons(3);
        s.validate(&g).unwrap();
        assert_eq!(s.cluster_count(), 3);
        let w = Clustering::whole(&g, 0, 8.0).unwrap();
        w.validate(&g).unwrap();
        assert_eq!(w.cluster_count(), 1);
        assert_eq!(w.center_dist, vec![0.0, 1.0, 3.0]);
    }

    #[test]
    fn json_round_trip() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let mut w = Clustering::whole(&g, 1, 4.0).unwrap();
        w.assignment[2] = None;
        let text = serde_json::to_string(&w).unwrap();
        assert!(text.contains("\"centers\":{\"0\":1}"));
        let back: Clustering = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
    }
}
