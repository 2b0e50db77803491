//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::OnceLock;

use modcheck::elementary_wall;
use modcheck::graph::{Graph, VertexSet};
use modcheck::walls::Wall;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// The graph on `n` vertices whose edges are the set bits of `mask` over
/// [`pairs`].
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let edges: Vec<_> = pairs(n)
        .into_iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e)
        .collect();
    Graph::from_edges(n, &edges)
}

/// Every labelled graph on exactly `n` vertices.
pub fn labelled_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let m = n * n.saturating_sub(1) / 2;
    (0..1u64 << m).map(move |mask| graph_from_mask(n, mask))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            if k.is_multiple_of(2) {
                p.swap(i, k - 1);
            } else {
                p.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut p, &mut out);
    out
}

fn pair_index(n: usize) -> Vec<Vec<usize>> {
    let mut index = vec![vec![0usize; n]; n];
    for (i, (u, v)) in pairs(n).into_iter().enumerate() {
        index[u][v] = i;
        index[v][u] = i;
    }
    index
}

/// Isomorphism-invariant key of a graph with at most 7 vertices: the order and
/// the least edge mask over all relabellings.
pub fn canonical(g: &Graph) -> (usize, u64) {
    let n = g.n();
    assert!(n <= 7);
    let index = pair_index(n);
    let edges = g.edges();
    let best = permutations(n)
        .iter()
        .map(|p| edges.iter().fold(0u64, |m, &(u, v)| m | 1 << index[p[u]][p[v]]))
        .min()
        .unwrap_or(0);
    (n, best)
}

fn classes(n: usize) -> Vec<Graph> {
    let ps = pairs(n);
    let index = pair_index(n);
    let perms = permutations(n);
    let mut out = Vec::new();
    for mask in 0..1u64 << ps.len() {
        let canonical = perms.iter().all(|p| {
            let mut image = 0u64;
            for (i, &(u, v)) in ps.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    image |= 1 << index[p[u]][p[v]];
                }
            }
            image >= mask
        });
        if canonical {
            out.push(graph_from_mask(n, mask));
        }
    }
    out
}

/// One representative per isomorphism class on exactly `n ≤ 6` vertices.
pub fn iso_classes(n: usize) -> &'static [Graph] {
    static CACHE: [OnceLock<Vec<Graph>>; 7] = [const { OnceLock::new() }; 7];
    CACHE[n].get_or_init(|| classes(n))
}

/// Representatives of all graphs with at most `max` vertices.
pub fn iso_classes_upto(max: usize) -> Vec<Graph> {
    (0..=max).flat_map(|n| iso_classes(n).iter().cloned()).collect()
}

/// Graphs on `1..=max` vertices for property tests.
pub fn graph_strategy(max: usize) -> impl Strategy<Value = Graph> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let edges: Vec<_> = pairs(n)
                .into_iter()
                .zip(bits)
                .filter(|(_, b)| *b)
                .map(|(e, _)| e)
                .collect();
            Graph::from_edges(n, &edges)
        })
    })
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<_> = pairs(n).into_iter().filter(|_| rng.gen_bool(p)).collect();
    Graph::from_edges(n, &edges)
}

/// An elementary `r`-wall with `chords` random extra edges and `extra`
/// pendant vertices hung on random wall vertices.
pub fn wall_host(rng: &mut impl Rng, r: usize, chords: usize, extra: usize) -> (Graph, Wall) {
    let w = elementary_wall(r).unwrap();
    let mut g = w.graph().clone();
    let n = g.n();
    let mut added = 0;
    while added < chords {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && !g.has_edge(u, v) {
            g.add_edge(u, v);
            added += 1;
        }
    }
    for i in 0..extra {
        let v = g.add_vertex((n + i) as u32);
        let u = rng.gen_range(0..n);
        g.add_edge(u, v);
    }
    (g, w)
}

pub fn random_subset(rng: &mut impl Rng, n: usize, size: usize) -> VertexSet {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    all.into_iter().take(size).collect()
}

/// A connected set grown from a random vertex by random frontier picks.
pub fn random_connected_set(rng: &mut impl Rng, g: &Graph, size: usize) -> VertexSet {
    let mut set = VertexSet::from([rng.gen_range(0..g.n())]);
    while set.len() < size {
        let frontier: Vec<usize> = set
            .iter()
            .flat_map(|&v| g.neighbors(v).iter().copied())
            .filter(|u| !set.contains(u))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        match frontier.choose(rng) {
            Some(&u) => {
                set.insert(u);
            }
            None => break,
        }
    }
    set
}

/// All simple `x`–`y` paths with at least one interior vertex, as vertex
/// sets.
pub fn long_paths(g: &Graph, x: usize, y: usize) -> Vec<VertexSet> {
    fn walk(g: &Graph, cur: usize, y: usize, path: &mut Vec<usize>, out: &mut Vec<VertexSet>) {
        for &w in g.neighbors(cur) {
            if w == y {
                if path.len() >= 2 {
                    let mut s: VertexSet = path.iter().copied().collect();
                    s.insert(y);
                    out.push(s);
                }
            } else if !path.contains(&w) {
                path.push(w);
                walk(g, w, y, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    if x != y {
        walk(g, x, y, &mut vec![x], &mut out);
    }
    out
}

/// Independent reading of `dp_k` / `s-dp_k`: pick one long path per pair so
/// that the picks are pairwise disjoint and, with `s`, every cross pair of
/// vertices is at distance more than `s`.
pub fn disjoint_paths_oracle(g: &Graph, ends: &[usize], s: Option<usize>) -> bool {
    let distinct: BTreeSet<_> = ends.iter().collect();
    if distinct.len() != ends.len() {
        return false;
    }
    let dist = g.distances();
    let options: Vec<Vec<VertexSet>> = ends.chunks(2).map(|p| long_paths(g, p[0], p[1])).collect();
    fn pick(
        i: usize,
        options: &[Vec<VertexSet>],
        chosen: &mut Vec<VertexSet>,
        dist: &[Vec<usize>],
        s: Option<usize>,
    ) -> bool {
        if i == options.len() {
            return true;
        }
        for p in &options[i] {
            let ok = chosen
                .iter()
                .all(|q| p.is_disjoint(q) && s.is_none_or(|s| p.iter().all(|&a| q.iter().all(|&b| dist[a][b] > s))));
            if ok {
                chosen.push(p.clone());
                if pick(i + 1, options, chosen, dist, s) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    pick(0, &options, &mut Vec::new(), &dist, s)
}
