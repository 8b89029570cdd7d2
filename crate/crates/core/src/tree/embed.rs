use serde::{Deserialize, Serialize};

use super::lca::Lca;
use crate::decomp::{build_hierarchy, refine_with, Mode, RefinedHierarchy};
use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};
use crate::rng::Substreams;
use crate::sssp::DistanceCache;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeNode {
    pub id: usize,
    pub level: usize,
    pub center: Vertex,
    pub parent: Option<usize>,
    pub parent_weight: f64,
}

/// A rooted tree with one node per refined cluster and one leaf per vertex.
///
/// Node ids run top-down: the root is node 0, then level `L - 1` clusters in
/// id order, and so on down to the leaves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "TreeJson", try_from = "TreeJson")]
pub struct TreeEmbedding {
    pub nodes: Vec<TreeNode>,
    pub leaf_of: Vec<usize>,
    pub depth_weight: Vec<f64>,
    lca: Lca,
}

impl TreeEmbedding {
    fn assemble(nodes: Vec<TreeNode>, leaf_of: Vec<usize>) -> Result<Self> {
        let parents: Vec<Option<usize>> = nodes.iter().map(|x| x.parent).collect();
        let roots: Vec<usize> = (0..nodes.len()).filter(|&x| parents[x].is_none()).collect();
        if roots != [0] || nodes.iter().enumerate().any(|(i, x)| x.id != i) {
            return Err(Error::InvalidParam("tree must have node ids 0.. with root 0".into()));
        }
        // Parents come before children, so one forward pass fills depths.
        let mut depth_weight = vec![0.0; nodes.len()];
        for x in &nodes[1..] {
            let p = x.parent.expect("non-root");
            if p >= x.id {
                return Err(Error::InvalidParam("parent ids must precede child ids".into()));
            }
            depth_weight[x.id] = depth_weight[p] + x.parent_weight;
        }
        if leaf_of.iter().any(|&x| x >= nodes.len()) {
            return Err(Error::InvalidParam("leaf id out of range".into()));
        }
        let lca = Lca::new(&parents, 0);
        Ok(TreeEmbedding { nodes, leaf_of, depth_weight, lca })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        self.lca.lca(a, b)
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> Result<f64> {
        let n = self.leaf_of.len();
        for x in [u, v] {
            if x >= n {
                return Err(Error::UnknownVertex(x));
            }
        }
        Ok(self.leaf_distance(u, v))
    }

    pub(crate) fn leaf_distance(&self, u: Vertex, v: Vertex) -> f64 {
        if u == v {
            return 0.0;
        }
        let (a, b) = (self.leaf_of[u], self.leaf_of[v]);
        let c = self.lca.lca(a, b);
        self.depth_weight[a] + self.depth_weight[b] - 2.0 * self.depth_weight[c]
    }
}

pub fn tree_distance(tree: &TreeEmbedding, u: Vertex, v: Vertex) -> Result<f64> {
    tree.distance(u, v)
}

pub fn build_tree(refined: &RefinedHierarchy, graph: &WeightedGraph) -> TreeEmbedding {
    build_tree_with(refined, &mut DistanceCache::new(graph))
}

/// Edge weights are exact graph distances between consecutive projected
/// centers; `cache` holds one search per distinct parent center.
pub fn build_tree_with(refined: &RefinedHierarchy, cache: &mut DistanceCache<'_>) -> TreeEmbedding {
    let top = refined.top();
    let mut offset = vec![0; top + 1];
    let mut next = 0;
    for l in (0..=top).rev() {
        offset[l] = next;
        next += refined.cluster_count(l);
    }
    let mut nodes = Vec::with_capacity(next);
    for l in (0..=top).rev() {
        for (c, &center) in refined.centers[l].iter().enumerate() {
            let (parent, parent_weight) = if l == top {
                (None, 0.0)
            } else {
                let up = refined.parent_cluster[l][c];
                let up_center = refined.centers[l + 1][up];
                (Some(offset[l + 1] + up), cache.dist(up_center, center))
            };
            nodes.push(TreeNode { id: nodes.len(), level: l, center, parent, parent_weight });
        }
    }
    let leaf_of = refined.parts[0].iter().map(|&c| offset[0] + c).collect();
    TreeEmbedding::assemble(nodes, leaf_of).expect("refined hierarchy yields a valid tree")
}

/// Hierarchy, refinement and tree for substream copy `copy`.
pub fn sample_tree(
    graph: &WeightedGraph,
    mode: Mode,
    streams: &Substreams,
    copy: u64,
    cache: &mut DistanceCache<'_>,
) -> Result<TreeEmbedding> {
    let h = build_hierarchy(graph, mode, streams, copy)?;
    let refined = refine_with(&h, cache);
    Ok(build_tree_with(&refined, cache))
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct TreeJson {
    nodes: Vec<TreeNode>,
    leaf_of: Vec<usize>,
}

impl From<TreeEmbedding> for TreeJson {
    fn from(t: TreeEmbedding) -> Self {
        TreeJson { nodes: t.nodes, leaf_of: t.leaf_of }
    }
}

impl TryFrom<TreeJson> for TreeEmbedding {
    type Error = Error;

    fn try_from(j: TreeJson) -> Result<Self> {
        TreeEmbedding::assemble(j.nodes, j.leaf_of)
    }
}
