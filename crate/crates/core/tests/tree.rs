#![allow(clippy::needless_range_loop)]

mod common;

use metric_embed::decomp::Mode;
use metric_embed::harness::floyd_warshall;
use metric_embed::rng::Purpose;
use metric_embed::sssp::DistanceCache;
use metric_embed::tree::{sample_tree, stretch_stats, tree_distance, Lca, TreeEmbedding};
use metric_embed::{Substreams, WeightedGraph};
use rand::Rng;

use common::{gen, random_tree_parents};

fn naive_lca(parent: &[Option<usize>], mut a: usize, mut b: usize) -> usize {
    let depth = |mut x: usize| {
        let mut d = 0;
        while let Some(p) = parent[x] {
            x = p;
            d += 1;
        }
        d
    };
    let (mut da, mut db) = (depth(a), depth(b));
    while da > db {
        a = parent[a].unwrap();
        da -= 1;
    }
    while db > da {
        b = parent[b].unwrap();
        db -= 1;
    }
    while a != b {
        a = parent[a].unwrap();
        b = parent[b].unwrap();
    }
    a
}

#[test]
fn lca_matches_naive_walk() {
    for (n, seed) in [(1, 0), (2, 1), (37, 2), (1000, 3), (10_000, 4)] {
        let parent = random_tree_parents(n, seed);
        let lca = Lca::new(&parent, 0);
        let mut rng = Substreams::new(seed).stream(Purpose::Pairs, 0, 0);
        for _ in 0..2000 {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            assert_eq!(lca.lca(a, b), naive_lca(&parent, a, b));
        }
    }
    // A deep path.
    let parent: Vec<Option<usize>> = (0..10_000usize).map(|x| x.checked_sub(1)).collect();
    let lca = Lca::new(&parent, 0);
    assert_eq!(lca.lca(9_999, 5_000), 5_000);
    assert_eq!(lca.depth(9_999), 9_999);
}

/// Sum of edge weights along the tree path, by walking parent pointers.
fn walk_distance(t: &TreeEmbedding, u: usize, v: usize) -> f64 {
    let (mut a, mut b) = (t.leaf_of[u], t.leaf_of[v]);
    let mut total = 0.0;
    while a != b {
        let (x, y) = (&t.nodes[a], &t.nodes[b]);
        if x.level <= y.level {
            total += x.parent_weight;
            a = x.parent.unwrap();
        } else {
            total += y.parent_weight;
            b = y.parent.unwrap();
        }
    }
    total
}

fn sample(g: &WeightedGraph, mode: Mode, seed: u64) -> TreeEmbedding {
    sample_tree(g, mode, &Substreams::new(seed), 0, &mut DistanceCache::new(g)).unwrap()
}

#[test]
fn tree_shape_and_edge_weights() {
    for (i, spec) in ["er:30:0.15:w5", "grid:4x6", "rgg:40:0.3:w3", "star:9"].into_iter().enumerate() {
        let g = gen(spec, i as u64);
        let fw = floyd_warshall(&g);
        for mode in [Mode::Exact, Mode::approximate()] {
            let t = sample(&g, mode, 10 + i as u64);
            assert_eq!(t.nodes[t.root()].level, g.level_count());
            for x in &t.nodes[1..] {
                let p = &t.nodes[x.parent.unwrap()];
                assert_eq!(p.level, x.level + 1);
                assert_eq!(x.parent_weight, fw[x.center][p.center]);
            }
            for v in 0..g.n() {
                assert_eq!(t.nodes[t.leaf_of[v]].level, 0);
                assert_eq!(t.nodes[t.leaf_of[v]].center, v);
            }
        }
    }
}

#[test]
fn distance_matches_walk_and_is_symmetric() {
    let g = gen("er:48:0.12:w7", 5);
    let t = sample(&g, Mode::Exact, 3);
    let mut rng = Substreams::new(1).stream(Purpose::Pairs, 0, 0);
    for _ in 0..1000 {
        let (u, v) = (rng.gen_range(0..g.n()), rng.gen_range(0..g.n()));
        let d = tree_distance(&t, u, v).unwrap();
        assert_eq!(d, tree_distance(&t, v, u).unwrap());
        assert!((d - walk_distance(&t, u, v)).abs() < 1e-9);
    }
    for v in 0..g.n() {
        assert_eq!(t.distance(v, v).unwrap(), 0.0);
    }
    assert!(t.distance(0, g.n()).is_err());
}

#[test]
fn dominance_in_both_modes() {
    for (i, spec) in ["er:40:0.1:w16", "grid:5x5:w4", "path:20:w9", "rgg:30:0.35"].into_iter().enumerate() {
        let g = gen(spec, 40 + i as u64);
        let fw = floyd_warshall(&g);
        for mode in [Mode::Exact, Mode::approximate()] {
            for seed in 0..5 {
                let t = sample(&g, mode, seed);
                for u in 0..g.n() {
                    for v in 0..g.n() {
                        assert!(t.distance(u, v).unwrap() >= fw[u][v] - 1e-9);
                    }
                }
            }
        }
    }
}

#[test]
fn star_leaves_never_contract() {
    let g = gen("star:4", 0);
    let r = stretch_stats(&g, 100, Mode::Exact, &Substreams::new(2)).unwrap();
    assert!(r.all_pairs);
    assert_eq!(r.dominance_violations, 0);
    assert!(r.min_stretch >= 1.0);
}

#[test]
fn k2_stretch_is_exactly_one() {
    let r = stretch_stats(&common::k2(), 17, Mode::approximate(), &Substreams::new(0)).unwrap();
    assert_eq!(r.max_mean_stretch, 1.0);
    assert_eq!(r.min_stretch, 1.0);
}

#[test]
fn stretch_is_reproducible() {
    let g = gen("grid:6x6", 0);
    let a = stretch_stats(&g, 30, Mode::Exact, &Substreams::new(9)).unwrap();
    let b = stretch_stats(&g, 30, Mode::Exact, &Substreams::new(9)).unwrap();
    assert_eq!(a, b);
    assert!(a.max_mean_stretch <= 16.0 * 36f64.ln());
}

#[test]
fn tree_json_round_trip_preserves_distances() {
    let g = gen("er:20:0.2:w3", 8);
    let t = sample(&g, Mode::Exact, 1);
    let back: TreeEmbedding = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
    for u in 0..g.n() {
        for v in 0..g.n() {
            assert_eq!(back.distance(u, v).unwrap(), t.distance(u, v).unwrap());
        }
    }
}
