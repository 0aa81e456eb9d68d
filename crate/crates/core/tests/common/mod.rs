//! Graph generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vc_core::{StaticGraph, Vertex};

pub const DENSITIES: [f64; 4] = [0.1, 0.3, 0.5, 0.8];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> StaticGraph {
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    StaticGraph::from_edges(n, &edges).unwrap()
}

/// The `i`-th graph of the standard random family: n in [1, 18], one of four densities.
pub fn family_graph(i: usize) -> StaticGraph {
    let mut r = rng(0x5eed_0000 + i as u64);
    let n = r.gen_range(1..=18);
    gnp(n, DENSITIES[i % DENSITIES.len()], &mut r)
}

pub fn disjoint_union(a: &StaticGraph, b: &StaticGraph) -> StaticGraph {
    let shift = a.num_vertices() as Vertex;
    let edges: Vec<_> = a.edges().chain(b.edges().map(|(u, v)| (u + shift, v + shift))).collect();
    StaticGraph::from_edges(a.num_vertices() + b.num_vertices(), &edges).unwrap()
}

pub fn two_copies(h: &StaticGraph) -> StaticGraph {
    disjoint_union(h, h)
}

pub fn clique(n: usize) -> StaticGraph {
    let edges: Vec<_> = (0..n as Vertex).flat_map(|u| (u + 1..n as Vertex).map(move |v| (u, v))).collect();
    StaticGraph::from_edges(n, &edges).unwrap()
}

pub fn cycle(n: usize) -> StaticGraph {
    let edges: Vec<_> = (0..n as Vertex).map(|u| {
        let v = (u + 1) % n as Vertex;
        (u.min(v), u.max(v))
    }).collect();
    StaticGraph::from_edges(n, &edges).unwrap()
}

/// Random forest: every vertex after the first attaches to an earlier one or starts a new tree.
pub fn forest(n: usize, rng: &mut impl Rng) -> StaticGraph {
    let mut edges = Vec::new();
    for v in 1..n as Vertex {
        if rng.gen_bool(0.85) {
            edges.push((rng.gen_range(0..v), v));
        }
    }
    StaticGraph::from_edges(n, &edges).unwrap()
}

/// Small blocks that survive the degree-one and triangle rules while a hub is attached.
fn block(kind: usize) -> (usize, Vec<(Vertex, Vertex)>) {
    match kind {
        0 => (4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]),
        1 => (5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]),
        2 => (4, (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect()),
        3 => (5, (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect()),
        // K_{2,3}
        4 => (5, vec![(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]),
        // wheel: 0 joined to the 4-cycle 1-2-3-4
        _ => (5, vec![(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (2, 3), (3, 4), (1, 4)]),
    }
}

/// Two-level hub structure: a top hub adjacent to everything joins two halves; each half
/// is a sub-hub adjacent to its whole half joining two blocks. Removing the top hub splits
/// the graph, and removing a sub-hub splits its half again. Labels are shuffled.
pub fn nested_hubs(rng: &mut impl Rng) -> StaticGraph {
    let mut edges = Vec::new();
    let mut next: Vertex = 1; // vertex 0 is the top hub
    for _ in 0..2 {
        let sub = next;
        next += 1;
        edges.push((0, sub));
        for _ in 0..2 {
            let (size, local) = block(rng.gen_range(0..6));
            let base = next;
            next += size as Vertex;
            edges.extend(local.into_iter().map(|(u, v)| (base + u, base + v)));
            for u in base..next {
                edges.push((sub, u));
                edges.push((0, u));
            }
        }
    }
    let n = next as usize;
    let mut perm: Vec<Vertex> = (0..n as Vertex).collect();
    perm.shuffle(rng);
    let edges: Vec<_> = edges
        .into_iter()
        .map(|(u, v)| {
            let (a, b) = (perm[u as usize], perm[v as usize]);
            (a.min(b), a.max(b))
        })
        .collect();
    StaticGraph::from_edges(n, &edges).unwrap()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
