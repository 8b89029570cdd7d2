//! Undirected weighted graphs and their text formats.
//!
//! Vertices are `0..n` internally. Both on-disk formats use 1-based ids.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Vertex index, `0..n`.
pub type Vertex = usize;
/// Index into [`WeightedGraph::edges`].
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// Smaller endpoint.
    pub u: Vertex,
    /// Larger endpoint.
    pub v: Vertex,
    pub w: f64,
}

impl Edge {
    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A connected undirected graph with weights in `[1, W]`.
///
/// Edges are stored once with `u < v`, sorted by `(u, v)`; parallel edges are
/// collapsed to their minimum weight. Adjacency lists are sorted by neighbour.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(Vertex, EdgeId)>>,
    max_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    /// `n m` header followed by `u v w` lines.
    EdgeList,
    /// `p sp n m` header and `a u v w` arc lines; arcs are symmetrised.
    Dimacs,
}

impl WeightedGraph {
    /// Builds a graph from 0-based `(u, v, w)` triples.
    ///
    /// Rejects self-loops, weights outside `[1, inf)` and disconnected inputs.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex, f64)>,
    {
        let mut collapsed: BTreeMap<(Vertex, Vertex), f64> = BTreeMap::new();
        for (i, (a, b, w)) in edges.into_iter().enumerate() {
            if a >= n {
                return Err(Error::UnknownVertex(a));
            }
            if b >= n {
                return Err(Error::UnknownVertex(b));
            }
            if a == b {
                return Err(Error::InvalidParam(format!("self-loop at vertex {a}")));
            }
            if !(w.is_finite() && w >= 1.0) {
                return Err(Error::WeightOutOfRange { line: i + 1, weight: w });
            }
            let key = (a.min(b), a.max(b));
            collapsed
                .entry(key)
                .and_modify(|cur| *cur = cur.min(w))
                .or_insert(w);
        }
        Self::from_collapsed(n, collapsed)
    }

    fn from_collapsed(n: usize, collapsed: BTreeMap<(Vertex, Vertex), f64>) -> Result<Self> {
        let edges: Vec<Edge> = collapsed
            .into_iter()
            .map(|((u, v), w)| Edge { u, v, w })
            .collect();
        let mut adj = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let max_weight = edges.iter().map(|e| e.w).fold(1.0, f64::max);
        let g = WeightedGraph { n, edges, adj, max_weight };
        let components = g.component_count();
        if components > 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// `(neighbour, edge id)` pairs sorted by neighbour.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.adj[v]
    }

    /// Largest edge weight `W` (1 for edgeless graphs).
    pub fn max_weight(&self) -> f64 {
        self.max_weight
    }

    pub fn edge_between(&self, a: Vertex, b: Vertex) -> Option<EdgeId> {
        let list = &self.adj[a];
        list.binary_search_by_key(&b, |&(x, _)| x)
            .ok()
            .map(|i| list[i].1)
    }

    /// Number of levels `L = ceil(lg(n * W))` of a dyadic hierarchy over this graph.
    pub fn level_count(&self) -> usize {
        let x = self.n as f64 * self.max_weight;
        if x <= 1.0 {
            0
        } else {
            x.log2().ceil() as usize
        }
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        count
    }

    /// Serialises to the 1-based edge-list format.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.w);
        }
        out
    }

    /// SHA-256 of the canonical edge-list serialisation, hex encoded.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_edge_list().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

pub fn parse_graph<R: BufRead>(input: R, format: GraphFormat) -> Result<WeightedGraph> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(input),
        GraphFormat::Dimacs => parse_dimacs(input),
    }
}

pub fn parse_graph_str(input: &str, format: GraphFormat) -> Result<WeightedGraph> {
    parse_graph(input.as_bytes(), format)
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from `{tok}`")))
}

fn parse_endpoint(tok: Option<&str>, line: usize, n: usize) -> Result<Vertex> {
    let id: usize = parse_field(tok, line, "vertex id")?;
    if id == 0 || id > n {
        return Err(parse_err(line, format!("vertex id {id} outside 1..={n}")));
    }
    Ok(id - 1)
}

fn parse_weight(tok: Option<&str>, line: usize) -> Result<f64> {
    let w: f64 = parse_field(tok, line, "weight")?;
    if !(w.is_finite() && w >= 1.0) {
        return Err(Error::WeightOutOfRange { line, weight: w });
    }
    Ok(w)
}

fn insert_edge(
    edges: &mut BTreeMap<(Vertex, Vertex), f64>,
    a: Vertex,
    b: Vertex,
    w: f64,
    line: usize,
) -> Result<()> {
    if a == b {
        return Err(parse_err(line, "self-loop"));
    }
    edges
        .entry((a.min(b), a.max(b)))
        .and_modify(|cur| *cur = cur.min(w))
        .or_insert(w);
    Ok(())
}

fn parse_edge_list<R: BufRead>(input: R) -> Result<WeightedGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = BTreeMap::new();
    let mut seen = 0usize;
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut toks = body.split_whitespace();
        match header {
            None => {
                let n = parse_field(toks.next(), line_no, "vertex count")?;
                let m = parse_field(toks.next(), line_no, "edge count")?;
                if toks.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens in header"));
                }
                header = Some((n, m));
            }
            Some((n, m)) => {
                if seen == m {
                    return Err(parse_err(line_no, format!("more than {m} edge lines")));
                }
                let a = parse_endpoint(toks.next(), line_no, n)?;
                let b = parse_endpoint(toks.next(), line_no, n)?;
                let w = parse_weight(toks.next(), line_no)?;
                if toks.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens"));
                }
                insert_edge(&mut edges, a, b, w, line_no)?;
                seen += 1;
            }
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(1, "missing `n m` header"))?;
    if seen != m {
        return Err(parse_err(0, format!("header declares {m} edges, found {seen}")));
    }
    WeightedGraph::from_collapsed(n, edges)
}

fn parse_dimacs<R: BufRead>(input: R) -> Result<WeightedGraph> {
    let mut n: Option<usize> = None;
    let mut edges = BTreeMap::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let mut toks = line.split_whitespace();
        match toks.next() {
            None | Some("c") => {}
            Some("p") => {
                if n.is_some() {
                    return Err(parse_err(line_no, "duplicate problem line"));
                }
                match toks.next() {
                    Some("sp") => {}
                    other => {
                        return Err(parse_err(
                            line_no,
                            format!("expected `p sp`, found {other:?}"),
                        ))
                    }
                }
                n = Some(parse_field(toks.next(), line_no, "vertex count")?);
                let _arcs: usize = parse_field(toks.next(), line_no, "arc count")?;
            }
            Some("a") => {
                let n = n.ok_or_else(|| parse_err(line_no, "arc before problem line"))?;
                let a = parse_endpoint(toks.next(), line_no, n)?;
                let b = parse_endpoint(toks.next(), line_no, n)?;
                let w = parse_weight(toks.next(), line_no)?;
                insert_edge(&mut edges, a, b, w, line_no)?;
            }
            Some(tag) => return Err(parse_err(line_no, format!("unknown line tag `{tag}`"))),
        }
    }
    let n = n.ok_or_else(|| parse_err(1, "missing `p sp n m` line"))?;
    WeightedGraph::from_collapsed(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2() {
        let g = parse_graph_str("2 1\n1 2 1.0", GraphFormat::EdgeList).unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        assert_eq!(g.edges()[0], Edge { u: 0, v: 1, w: 1.0 });
        assert_eq!(g.level_count(), 1);
    }

    #[test]
    fn single_vertex() {
        let g = parse_graph_str("1 0", GraphFormat::EdgeList).unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
        assert_eq!(g.max_weight(), 1.0);
        assert_eq!(g.level_count(), 0);
    }

    #[test]
    fn parallel_edges_collapse_to_min() {
        let text = "3 4\n1 2 1.0\n2 3 1.0\n1 3 1.0\n1 2 2.0\n";
        let g = parse_graph_str(text, GraphFormat::EdgeList).unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.edge(g.edge_between(0, 1).unwrap()).w, 1.0);
        let again = parse_graph_str(&g.to_edge_list(), GraphFormat::EdgeList).unwrap();
        assert_eq!(again.m(), 3);
        assert_eq!(again, g);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_graph_str("2 1\n1 x 1.0", GraphFormat::EdgeList) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_graph_str("2 1\n1 2 0.5", GraphFormat::EdgeList) {
            Err(Error::WeightOutOfRange { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_graph_str("3 1\n1 2 1", GraphFormat::EdgeList) {
            Err(Error::Disconnected { components: 2 }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_graph_str("2 1\n1 3 1", GraphFormat::EdgeList).is_err());
        assert!(parse_graph_str("2 2\n1 2 1", GraphFormat::EdgeList).is_err());
    }

    #[test]
    fn dimacs_symmetrises_arcs() {
        let text = "c tiny\np sp 3 4\na 1 2 3\na 2 1 2\na 2 3 1\na 3 2 1\n";
        let g = parse_graph_str(text, GraphFormat::Dimacs).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(g.edge(g.edge_between(1, 0).unwrap()).w, 2.0);
        assert_eq!(g.max_weight(), 2.0);
    }

    #[test]
    fn hash_is_stable_under_edge_order() {
        let a = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let b = WeightedGraph::from_edges(3, [(2, 1, 2.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash().len(), 64);
    }
}
