use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};

/// Relative tolerance for demand balance and conservation checks.
pub const BALANCE_TOL: f64 = 1e-9;

/// Per-vertex supply (positive) or sink (negative) values summing to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demand(pub Vec<f64>);

impl Demand {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let d = Demand(values);
        d.check_balanced()?;
        Ok(d)
    }

    pub fn zero(n: usize) -> Self {
        Demand(vec![0.0; n])
    }

    /// `q` units from `a` to `b`.
    pub fn pair(n: usize, a: Vertex, b: Vertex, q: f64) -> Self {
        let mut d = vec![0.0; n];
        d[a] += q;
        d[b] -= q;
        Demand(d)
    }

    pub fn l1(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn check_balanced(&self) -> Result<()> {
        let sum: f64 = self.0.iter().sum();
        let l1 = self.l1();
        if sum.abs() > BALANCE_TOL * l1 {
            return Err(Error::UnbalancedDemand { sum, l1 });
        }
        Ok(())
    }
}

/// Signed per-edge flow; positive values run from the lower to the higher
/// vertex id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow(pub Vec<f64>);

impl Flow {
    /// Out-flow minus in-flow at every vertex.
    pub fn divergence(&self, graph: &WeightedGraph) -> Vec<f64> {
        let mut div = vec![0.0; graph.n()];
        for (e, &f) in graph.edges().iter().zip(&self.0) {
            div[e.u] += f;
            div[e.v] -= f;
        }
        div
    }

    /// `sum_e |f(e)|`.
    pub fn l1(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    /// `sum_e w(e) |f(e)|`.
    pub fn cost(&self, graph: &WeightedGraph) -> f64 {
        graph.edges().iter().zip(&self.0).map(|(e, f)| e.w * f.abs()).sum()
    }

    /// Largest `|divergence(v) - d(v)|` relative to `max(||d||_1, 1)`.
    pub fn conservation_error(&self, graph: &WeightedGraph, demand: &Demand) -> f64 {
        let div = self.divergence(graph);
        let worst = div.iter().zip(&demand.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst / demand.l1().max(1.0)
    }
}
