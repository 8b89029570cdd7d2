//! Heavy-light decomposition of a forest and dyadic segments over its paths.
//!
//! Paths are edge-disjoint. Each one is stored top-down as a vertex sequence;
//! a light child's path starts at its parent, so a root path uses a prefix of
//! every heavy path it meets. Positions index edges: edge `k` joins
//! `vertices[k]` and `vertices[k + 1]`.

use serde::{Deserialize, Serialize};

use crate::graph::Vertex;

/// A contiguous edge range `[start, end)` of one heavy path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub path: usize,
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathCollection {
    paths: Vec<Vec<Vertex>>,
    /// For each non-root vertex `v`: the path holding edge `(parent(v), v)`
    /// and that edge's position.
    edge_pos: Vec<Option<(usize, usize)>>,
}

impl PathCollection {
    /// Heavy child = child with the largest subtree, ties to the smaller id.
    pub fn from_forest(parent: &[Option<Vertex>]) -> Self {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(v);
            }
        }
        // Preorder from each root, then sizes in reverse.
        let mut order = Vec::with_capacity(n);
        for r in (0..n).filter(|&v| parent[v].is_none()) {
            let mut stack = vec![r];
            while let Some(x) = stack.pop() {
                order.push(x);
                stack.extend(children[x].iter().rev());
            }
        }
        let mut size = vec![1usize; n];
        for &x in order.iter().rev() {
            if let Some(p) = parent[x] {
                size[p] += size[x];
            }
        }
        let heavy: Vec<Option<Vertex>> = (0..n)
            .map(|x| {
                children[x]
                    .iter()
                    .copied()
                    .max_by(|&a, &b| size[a].cmp(&size[b]).then(b.cmp(&a)))
            })
            .collect();

        let mut paths = Vec::new();
        let mut edge_pos = vec![None; n];
        let mut start_path = |top: Vertex, first: Option<Vertex>, paths: &mut Vec<Vec<Vertex>>| {
            let Some(mut x) = first else { return };
            let id = paths.len();
            let mut seq = vec![top];
            loop {
                edge_pos[x] = Some((id, seq.len() - 1));
                seq.push(x);
                match heavy[x] {
                    Some(h) => x = h,
                    None => break,
                }
            }
            paths.push(seq);
        };
        for &x in &order {
            if parent[x].is_none() {
                start_path(x, heavy[x], &mut paths);
            }
            for &c in &children[x] {
                if Some(c) != heavy[x] {
                    start_path(x, Some(c), &mut paths);
                }
            }
        }
        PathCollection { paths, edge_pos }
    }

    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    pub fn path(&self, id: usize) -> &[Vertex] {
        &self.paths[id]
    }

    pub fn edge_count(&self, id: usize) -> usize {
        self.paths[id].len() - 1
    }

    pub fn paths(&self) -> &[Vec<Vertex>] {
        &self.paths
    }

    /// `(path, position)` of the edge from `v` to its parent.
    pub fn edge_position(&self, v: Vertex) -> Option<(usize, usize)> {
        self.edge_pos[v]
    }

    /// The heavy-path prefixes making up the root-to-`v` path, root first.
    pub fn root_path_prefixes(&self, v: Vertex) -> Vec<Segment> {
        let mut out = Vec::new();
        let mut x = v;
        while let Some((path, pos)) = self.edge_pos[x] {
            out.push(Segment { path, start: 0, end: pos + 1 });
            x = self.paths[path][0];
        }
        out.reverse();
        out
    }

    /// Number of heavy paths met by the root-to-`v` path.
    pub fn paths_on_root_path(&self, v: Vertex) -> usize {
        self.root_path_prefixes(v).len()
    }

    /// Every distinct dyadic segment of path `id`.
    pub fn dyadic_segments(&self, id: usize) -> Vec<Segment> {
        dyadic_ranges(self.edge_count(id))
            .into_iter()
            .map(|(start, end)| Segment { path: id, start, end })
            .collect()
    }

    /// Dyadic segments covering edges `[start, end)` of path `id`, in order.
    pub fn decompose_interval(&self, id: usize, start: usize, end: usize) -> Vec<Segment> {
        decompose_range(self.edge_count(id), start, end)
            .into_iter()
            .map(|(s, e)| Segment { path: id, start: s, end: e })
            .collect()
    }

    /// Dyadic segments whose concatenation is the root-to-`v` forest path,
    /// all traversed away from the root.
    pub fn decompose_root_path(&self, v: Vertex) -> Vec<Segment> {
        self.root_path_prefixes(v)
            .into_iter()
            .flat_map(|p| self.decompose_interval(p.path, p.start, p.end))
            .collect()
    }

    /// The vertex pairs of a segment's edges, top-down.
    pub fn segment_edges(&self, s: Segment) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let seq = &self.paths[s.path];
        (s.start..s.end).map(move |k| (seq[k], seq[k + 1]))
    }
}

/// `ceil(lg len)`, with `len <= 1` giving 0.
pub fn ceil_lg(len: usize) -> usize {
    if len <= 1 {
        0
    } else {
        (usize::BITS - (len - 1).leading_zeros()) as usize
    }
}

fn block_end(len: usize, scale: usize, start: usize) -> usize {
    (start + (1 << scale)).min(len)
}

/// Aligned blocks `[j 2^i, min((j+1) 2^i, len))` for `i = 0..=ceil(lg len)`,
/// dropping truncated blocks that repeat a smaller scale.
pub fn dyadic_ranges(len: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for scale in 0..=ceil_lg(len) {
        let mut start = 0;
        while start < len {
            let end = block_end(len, scale, start);
            let repeat = scale > 0 && end - start <= 1 << (scale - 1);
            if !repeat {
                out.push((start, end));
            }
            start += 1 << scale;
        }
    }
    out
}

/// Greedy cover of `[start, end)` by the largest aligned block at each step.
pub fn decompose_range(len: usize, start: usize, end: usize) -> Vec<(usize, usize)> {
    assert!(start <= end && end <= len, "interval [{start}, {end}) outside path of {len} edges");
    let top = ceil_lg(len);
    let mut out = Vec::new();
    let mut pos = start;
    while pos < end {
        let scale = (0..=top)
            .rev()
            .find(|&s| pos.is_multiple_of(1 << s) && block_end(len, s, pos) <= end)
            .expect("scale 0 always fits");
        let next = block_end(len, scale, pos);
        out.push((pos, next));
        pos = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_tree() {
        let pc = PathCollection::from_forest(&[None, Some(0)]);
        assert_eq!(pc.paths(), &[vec![0, 1]]);
        assert_eq!(pc.dyadic_segments(0), vec![Segment { path: 0, start: 0, end: 1 }]);
        assert_eq!(pc.decompose_root_path(1), vec![Segment { path: 0, start: 0, end: 1 }]);
        assert!(pc.decompose_root_path(0).is_empty());
    }

    #[test]
    fn length_seven_interval() {
        let parent: Vec<Option<usize>> = (0..8usize).map(|v| v.checked_sub(1)).collect();
        let pc = PathCollection::from_forest(&parent);
        assert_eq!(pc.path_count(), 1);
        // The truncated top block covers the whole path.
        let cover = pc.decompose_interval(0, 0, 7);
        assert_eq!(cover, vec![Segment { path: 0, start: 0, end: 7 }]);
        assert_eq!(decompose_range(7, 0, 6), vec![(0, 4), (4, 6)]);
        assert!(cover.len() <= 2 * ceil_lg(7) + 2);
        assert_eq!(decompose_range(7, 1, 6), vec![(1, 2), (2, 4), (4, 6)]);
    }

    #[test]
    fn light_child_path_starts_at_parent() {
        //   0
        //  1  2
        //  3
        let pc = PathCollection::from_forest(&[None, Some(0), Some(0), Some(1)]);
        assert_eq!(pc.paths(), &[vec![0, 1, 3], vec![0, 2]]);
        assert_eq!(pc.edge_position(2), Some((1, 0)));
        assert_eq!(pc.paths_on_root_path(3), 1);
    }

    #[test]
    fn dyadic_ranges_dedupe() {
        // Five edges: scale 3 block [0,5) is new, scale 2's [4,5) repeats scale 0.
        let r = dyadic_ranges(5);
        assert!(r.contains(&(0, 5)) && r.contains(&(4, 5)));
        assert_eq!(r.iter().filter(|&&x| x == (4, 5)).count(), 1);
        assert!(dyadic_ranges(0).is_empty());
    }

    #[test]
    fn ceil_lg_values() {
        assert_eq!([0, 1, 2, 3, 4, 5, 8, 9].map(ceil_lg), [0, 0, 1, 2, 2, 3, 3, 4]);
    }
}
