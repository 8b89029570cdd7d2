use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flow::Demand;
use super::operator::{build_routing_operator, support_key, witness_map, RoutingConfig, RoutingOperator, Skeleton};
use crate::decomp::center_dist_cap;
use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};
use crate::rng::Substreams;
use crate::sssp::{approx_eq, sssp_exact};

/// Build attempts allowed by [`verify_or_rebuild`].
pub const CERTIFY_BUDGET: u32 = 16;
const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub edges: usize,
    /// `max_e sum_f w(f) |A(1_u - 1_v)|_f / dist(u, v)`.
    pub max_ratio: f64,
    /// The same with unit edge costs.
    pub max_ratio_unweighted: f64,
    pub min_ratio: f64,
    pub mean_ratio: f64,
    pub worst_edge: Option<(Vertex, Vertex)>,
    /// Bins `[2^k, 2^(k+1))` of the weighted per-edge ratio.
    pub histogram: Vec<HistogramBin>,
    pub max_conservation_error: f64,
    /// `None` means no threshold.
    pub threshold: Option<f64>,
    pub pass: bool,
}

fn histogram(values: &[f64]) -> Vec<HistogramBin> {
    let mut bins: Vec<HistogramBin> = Vec::new();
    for &r in values {
        let k = r.max(1.0).log2().floor() as usize;
        while bins.len() <= k {
            let lo = 2f64.powi(bins.len() as i32);
            bins.push(HistogramBin { lo, hi: 2.0 * lo, count: 0 });
        }
        bins[k].count += 1;
    }
    bins
}

/// Routes one unit across every edge and compares the cost with the
/// shortest-path distance of its endpoints.
pub fn verify_competitive_ratio(
    op: &RoutingOperator,
    graph: &WeightedGraph,
    threshold: Option<f64>,
) -> Result<RatioReport> {
    op.check_graph(graph)?;
    let per_edge = graph
        .edges()
        .par_iter()
        .map(|e| -> Result<(f64, f64, f64)> {
            let dist = sssp_exact(graph, &[(e.u, 0.0)])?.dist[e.v];
            let d = Demand::pair(graph.n(), e.u, e.v, 1.0);
            let f = op.apply(&d)?;
            Ok((f.cost(graph) / dist, f.l1() / dist, f.conservation_error(graph, &d)))
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = per_edge.iter().map(|x| x.0).collect();
    let (worst, max_ratio) = ratios
        .iter()
        .enumerate()
        .fold((None, 0.0), |b, (i, &r)| if r > b.1 { (Some(i), r) } else { b });
    let m = ratios.len();
    Ok(RatioReport {
        edges: m,
        max_ratio,
        max_ratio_unweighted: per_edge.iter().map(|x| x.1).fold(0.0, f64::max),
        min_ratio: if m == 0 { 0.0 } else { ratios.iter().copied().fold(f64::INFINITY, f64::min) },
        mean_ratio: if m == 0 { 0.0 } else { ratios.iter().sum::<f64>() / m as f64 },
        worst_edge: worst.map(|i| (graph.edge(i).u, graph.edge(i).v)),
        histogram: histogram(&ratios),
        max_conservation_error: per_edge.iter().map(|x| x.2).fold(0.0, f64::max),
        threshold,
        pass: threshold.is_none_or(|t| max_ratio <= t),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// `max |sum_{d'} f_{l,d,d'}(v) - p_{l,d}(v) / w_l(v)|`.
    pub out_flow_max_error: f64,
    /// `max |sum_{d} f_{l,d,d'}(v) - p_{l+1,d'}(v) / w_{l+1}(v)|`.
    pub in_flow_max_error: f64,
    /// `max |sum_d p_{l,d}(v) / w_l(v) - 1|`.
    pub mass_max_error: f64,
    pub w_min_over_dcnt: f64,
    pub w_max_over_dcnt: f64,
    pub w_bounds_ok: bool,
    pub center_cap_ok: bool,
    pub paths_checked: usize,
    pub path_expansion_ok: bool,
    /// Largest `sum |f(u) - f(v)| 2^l / dist(u, v)` over edges and levels.
    pub kappa: f64,
    pub pass: bool,
}

/// How many copy pairs per level boundary get their witness paths expanded;
/// `None` checks them all.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityOptions {
    pub max_copy_pairs: Option<usize>,
}

/// Checks the internal identities of a built operator against `graph`.
pub fn check_identities(
    op: &RoutingOperator,
    graph: &WeightedGraph,
    opts: IdentityOptions,
) -> Result<IdentityReport> {
    op.check_graph(graph)?;
    let n = op.n;
    let mut out_err: f64 = 0.0;
    let mut in_err: f64 = 0.0;
    let mut mass_err: f64 = 0.0;
    for lvl in &op.levels {
        for v in 0..n {
            let total: f64 = (0..lvl.copies.len()).map(|d| lvl.share(d, v)).sum();
            mass_err = mass_err.max((total - 1.0).abs());
        }
    }
    for l in 0..op.top {
        let (lo, hi) = (&op.levels[l], &op.levels[l + 1]);
        for v in 0..n {
            let a: Vec<f64> = (0..lo.copies.len()).map(|i| lo.share(i, v)).collect();
            let b: Vec<f64> = (0..hi.copies.len()).map(|j| hi.share(j, v)).collect();
            for &ai in &a {
                let out: f64 = b.iter().map(|bj| ai * bj).sum();
                out_err = out_err.max((out - ai).abs());
            }
            for &bj in &b {
                let inflow: f64 = a.iter().map(|ai| ai * bj).sum();
                in_err = in_err.max((inflow - bj).abs());
            }
        }
    }

    let dcnt = op.dcnt as f64;
    let all_w = op.levels.iter().flat_map(|l| l.w.iter().copied());
    let (w_min, w_max) = all_w.fold((f64::INFINITY, 0.0f64), |(a, b), w| (a.min(w), b.max(w)));
    let w_bounds_ok = n == 0 || (w_min >= dcnt / 16.0 && w_max <= dcnt * (1.0 + IDENTITY_TOL));

    let center_cap_ok = op.levels.iter().filter(|l| l.level > 0 && l.level < op.top).all(|lvl| {
        let cap = center_dist_cap(n, lvl.level);
        lvl.copies.iter().all(|c| {
            (0..n).all(|v| !c.clustering.is_clustered(v) || c.clustering.center_dist[v] <= cap)
        })
    });

    let (paths_checked, path_expansion_ok) = check_path_expansion(op, graph, opts)?;
    let kappa = lipschitz_kappa(op, graph)?;
    let pass = out_err <= IDENTITY_TOL
        && in_err <= IDENTITY_TOL
        && mass_err <= IDENTITY_TOL
        && w_bounds_ok
        && center_cap_ok
        && path_expansion_ok;
    Ok(IdentityReport {
        out_flow_max_error: out_err,
        in_flow_max_error: in_err,
        mass_max_error: mass_err,
        w_min_over_dcnt: if n == 0 { 0.0 } else { w_min / dcnt },
        w_max_over_dcnt: w_max / dcnt,
        w_bounds_ok,
        center_cap_ok,
        paths_checked,
        path_expansion_ok,
        kappa,
        pass,
    })
}

/// Expands each inter-center path (center at level `l`, down to the witness,
/// up to the center at level `l + 1`) from its dyadic segments and checks it
/// is a walk of the recorded weight between the two centers.
fn check_path_expansion(
    op: &RoutingOperator,
    graph: &WeightedGraph,
    opts: IdentityOptions,
) -> Result<(usize, bool)> {
    let skeleton = Skeleton::new(&op.levels);
    let mut checked = 0;
    for l in 0..op.top {
        let (lo, hi) = (&op.levels[l], &op.levels[l + 1]);
        let kh = hi.copies.len();
        let total = lo.copies.len() * kh;
        let step = opts.max_copy_pairs.map_or(1, |k| total.div_ceil(k.max(1)));
        for ij in (0..total).step_by(step) {
            let (i, j) = (ij / kh, ij % kh);
            let (a, b) = (&lo.copies[i], &hi.copies[j]);
            let (pa, pb) = (&skeleton.paths[l][i], &skeleton.paths[l + 1][j]);
            let mut keys: Vec<_> = witness_map(a, b).into_iter().collect();
            keys.sort_by_key(|&(k, _)| k);
            for ((c, c2), (m, w)) in keys {
                debug_assert_eq!(support_key(a, b, w), Some((c, c2)));
                let from = a.clustering.centers[c];
                let to = b.clustering.centers[c2];
                let mut walk = vec![from];
                for s in pa.decompose_root_path(w) {
                    walk.extend(pa.segment_edges(s).map(|(_, y)| y));
                }
                for s in pb.decompose_root_path(w).into_iter().rev() {
                    let edges: Vec<_> = pb.segment_edges(s).collect();
                    walk.extend(edges.into_iter().rev().map(|(x, _)| x));
                }
                checked += 1;
                if walk.last() != Some(&to) {
                    return Ok((checked, false));
                }
                let mut weight = 0.0;
                for pair in walk.windows(2) {
                    match graph.edge_between(pair[0], pair[1]) {
                        Some(e) => weight += graph.edge(e).w,
                        None => return Ok((checked, false)),
                    }
                }
                if !approx_eq(weight, m) {
                    return Ok((checked, false));
                }
            }
        }
    }
    Ok((checked, true))
}

/// Measured constant in `sum_{d,d',C,C'} |f(u) - f(v)| <= kappa dist(u,v) / 2^l`.
pub fn lipschitz_kappa(op: &RoutingOperator, graph: &WeightedGraph) -> Result<f64> {
    op.check_graph(graph)?;
    let per_edge = graph
        .edges()
        .par_iter()
        .map(|e| -> Result<f64> {
            let dist = sssp_exact(graph, &[(e.u, 0.0)])?.dist[e.v];
            let (u, v) = (e.u, e.v);
            let mut worst: f64 = 0.0;
            for l in 0..op.top {
                let (lo, hi) = (&op.levels[l], &op.levels[l + 1]);
                let mut sum = 0.0;
                for (i, a) in lo.copies.iter().enumerate() {
                    let (au, av) = (lo.share(i, u), lo.share(i, v));
                    let same_a = a.clustering.assignment[u] == a.clustering.assignment[v];
                    for (j, b) in hi.copies.iter().enumerate() {
                        let fu = au * hi.share(j, u);
                        let fv = av * hi.share(j, v);
                        if same_a && b.clustering.assignment[u] == b.clustering.assignment[v] {
                            sum += (fu - fv).abs();
                        } else {
                            sum += fu + fv;
                        }
                    }
                }
                worst = worst.max(sum * 2f64.powi(l as i32) / dist);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_edge.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certified {
    pub operator: RoutingOperator,
    pub report: RatioReport,
    pub attempts: u32,
}

/// Rebuilds with fresh randomness until the competitive ratio is at most
/// `threshold`. Attempt `k > 0` uses `streams.derive(k)`.
pub fn verify_or_rebuild(
    graph: &WeightedGraph,
    config: RoutingConfig,
    streams: &Substreams,
    threshold: f64,
) -> Result<Certified> {
    if threshold.is_nan() || threshold <= 1.0 {
        return Err(Error::InvalidParam(format!("threshold must exceed 1, got {threshold}")));
    }
    let limit = threshold.is_finite().then_some(threshold);
    for attempt in 0..CERTIFY_BUDGET {
        let s = if attempt == 0 { *streams } else { streams.derive(attempt as u64) };
        let operator = build_routing_operator(graph, config, &s)?;
        let report = verify_competitive_ratio(&operator, graph, limit)?;
        if report.pass {
            return Ok(Certified { operator, report, attempts: attempt + 1 });
        }
    }
    Err(Error::ResampleBudget { what: "competitive ratio certificate", budget: CERTIFY_BUDGET as usize })
}
