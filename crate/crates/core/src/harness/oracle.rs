//! Brute-force reference computations for small graphs.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::routing::Demand;

/// Largest graph accepted by [`opt_transshipment`].
pub const OPT_MAX_N: usize = 12;

/// All-pairs distances by Floyd–Warshall.
pub fn floyd_warshall(graph: &WeightedGraph) -> Vec<Vec<f64>> {
    let n = graph.n();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for e in graph.edges() {
        d[e.u][e.v] = d[e.u][e.v].min(e.w);
        d[e.v][e.u] = d[e.v][e.u].min(e.w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Minimum `sum_e w(e) |f(e)|` over flows routing `demand`, by successive
/// shortest paths with Bellman–Ford on the residual network.
///
/// Graph edges become uncapacitated arcs in both directions; a super source
/// feeds every supply and a super sink drains every sink.
pub fn opt_transshipment(graph: &WeightedGraph, demand: &Demand) -> Result<f64> {
    let n = graph.n();
    if n > OPT_MAX_N {
        return Err(Error::OracleTooLarge { n, max: OPT_MAX_N });
    }
    if demand.0.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: demand.0.len() });
    }
    demand.check_balanced()?;

    let (source, sink) = (n, n + 1);
    let mut net = Network::new(n + 2);
    for e in graph.edges() {
        net.add(e.u, e.v, f64::INFINITY, e.w);
        net.add(e.v, e.u, f64::INFINITY, e.w);
    }
    let mut supply = 0.0;
    for (v, &x) in demand.0.iter().enumerate() {
        if x > 0.0 {
            net.add(source, v, x, 0.0);
            supply += x;
        } else if x < 0.0 {
            net.add(v, sink, -x, 0.0);
        }
    }
    let eps = 1e-12 * supply.max(1.0);
    let mut cost = 0.0;
    let mut sent = 0.0;
    while supply - sent > eps {
        let Some(path) = net.shortest_path(source, sink) else { break };
        let push = path.iter().map(|&a| net.cap[a]).fold(f64::INFINITY, f64::min);
        if push <= eps {
            break;
        }
        for &a in &path {
            net.cap[a] -= push;
            net.cap[a ^ 1] += push;
            cost += push * net.cost[a];
        }
        sent += push;
    }
    Ok(cost)
}

struct Network {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
    cost: Vec<f64>,
}

impl Network {
    fn new(n: usize) -> Self {
        Network { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new(), cost: Vec::new() }
    }

    // Arc `a` and its residual twin `a ^ 1`.
    fn add(&mut self, u: usize, v: usize, cap: f64, cost: f64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(cap);
        self.cost.push(cost);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0.0);
        self.cost.push(-cost);
    }

    fn shortest_path(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let n = self.head.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via = vec![usize::MAX; n];
        dist[s] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if dist[u].is_infinite() {
                    continue;
                }
                for &a in &self.head[u] {
                    let nd = dist[u] + self.cost[a];
                    if self.cap[a] > 0.0 && nd < dist[self.to[a]] - 1e-12 {
                        dist[self.to[a]] = nd;
                        via[self.to[a]] = a;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[t].is_infinite() {
            return None;
        }
        let mut path = Vec::new();
        let mut x = t;
        while x != s {
            let a = via[x];
            path.push(a);
            x = self.to[a ^ 1];
        }
        path.reverse();
        Some(path)
    }
}

/// `max_s |sum_v d(v) dist(s, v)|`, a lower bound on the optimal cost.
pub fn transshipment_lower_bound(dist: &[Vec<f64>], demand: &Demand) -> f64 {
    dist.iter()
        .map(|row| row.iter().zip(&demand.0).map(|(d, x)| d * x).sum::<f64>().abs())
        .fold(0.0, f64::max)
}
