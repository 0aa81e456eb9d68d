//! Reference answers: an exhaustive exact solver for small graphs and the greedy upper bound.
//!
//! The exhaustive solver shares no code with the search engine: it works on adjacency
//! bitmasks and uses no reduction rules.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{StaticGraph, Vertex};

/// Largest graph the exhaustive solver accepts.
pub const BRUTE_FORCE_LIMIT: usize = 26;

/// Exact minimum vertex cover by exhaustive search.
///
/// Returns the size and the lexicographically smallest minimum cover (as a sorted list).
pub fn brute_force_mvc(g: &StaticGraph) -> Result<(u32, Vec<Vertex>)> {
    let n = g.num_vertices();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::OracleLimit(n));
    }
    let adj: Vec<u32> = (0..n as Vertex)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();

    // start from the trivial cover of all non-isolated vertices
    let all: u32 = (0..n).filter(|&v| adj[v] != 0).fold(0, |m, v| m | (1 << v));
    let mut best = all;
    search(&adj, 0, &mut best);
    let cover: Vec<Vertex> = (0..n as Vertex).filter(|&v| best & (1 << v) != 0).collect();
    Ok((cover.len() as u32, cover))
}

/// `a` precedes `b` when its sorted vertex list is lexicographically smaller.
/// For sets of equal size that is the set holding the lowest differing vertex.
fn lex_less(a: u32, b: u32) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}

fn better(candidate: u32, best: u32) -> bool {
    let (c, b) = (candidate.count_ones(), best.count_ones());
    c < b || (c == b && lex_less(candidate, best))
}

/// Branches on the lowest vertex `u` with an uncovered edge: `u` is in the cover, or
/// `u` is out and all its uncovered neighbors are in.
fn search(adj: &[u32], cover: u32, best: &mut u32) {
    if cover.count_ones() > best.count_ones() {
        return;
    }
    let pick = (0..adj.len()).find(|&v| cover & (1 << v) == 0 && adj[v] & !cover != 0);
    let Some(u) = pick else {
        if better(cover, *best) {
            *best = cover;
        }
        return;
    };
    search(adj, cover | (1 << u), best);
    search(adj, cover | (adj[u] & !cover), best);
}

/// Greedy cover: repeatedly takes a maximum-degree vertex (lowest index on ties).
pub fn greedy_cover(g: &StaticGraph) -> Vec<Vertex> {
    let n = g.num_vertices();
    let mut degree: Vec<usize> = (0..n as Vertex).map(|v| g.degree(v)).collect();
    let mut heap: BinaryHeap<(usize, Reverse<Vertex>)> =
        (0..n as Vertex).filter(|&v| degree[v as usize] > 0).map(|v| (degree[v as usize], Reverse(v))).collect();
    let mut cover = Vec::new();
    while let Some((d, Reverse(v))) = heap.pop() {
        if d == 0 || degree[v as usize] != d {
            continue;
        }
        cover.push(v);
        degree[v as usize] = 0;
        for &u in g.neighbors(v) {
            let du = &mut degree[u as usize];
            if *du > 0 {
                *du -= 1;
                if *du > 0 {
                    heap.push((*du, Reverse(u)));
                }
            }
        }
    }
    cover.sort_unstable();
    cover
}

pub fn greedy_cover_size(g: &StaticGraph) -> u32 {
    greedy_cover(g).len() as u32
}
