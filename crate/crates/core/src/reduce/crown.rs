//! Crown rule.
//!
//! A crown is a pair `(I, H)` where `I` is a non-empty independent set, `H = N(I)`, and
//! some matching between `H` and `I` saturates `H`. Some minimum cover contains all of
//! `H` and none of `I`, so `H` can be forced and `I ∪ H` removed.
//!
//! Construction: take a maximal matching `M`; the unmatched vertices `O` are
//! independent. Find a maximum matching `M'` between `O` and `N(O)`. If some vertex of
//! `O` is left unmatched by `M'`, grow `I` from those vertices by repeatedly adding the
//! `M'`-mates of `N(I)`. Every vertex of the final `N(I)` is matched by `M'` (otherwise
//! an augmenting path would exist), so `(I, N(I))` is a crown.

use crate::graph::{StaticGraph, Vertex};
use crate::node::{DegreeInt, SearchNode};

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crown {
    /// The independent side, removed without entering the cover.
    pub independent: Vec<Vertex>,
    /// `N(independent)`, forced into the cover.
    pub head: Vec<Vertex>,
    /// Pairs `(h, i)` saturating `head`.
    pub matching: Vec<(Vertex, Vertex)>,
}

impl Crown {
    /// Forces the head into the node's cover, isolating the independent side.
    pub fn apply<D: DegreeInt>(&self, node: &mut SearchNode<D>, g: &StaticGraph) {
        for &h in &self.head {
            node.remove_vertex(g, h, true);
        }
        node.recompute_bounds();
    }

    /// Checks independence, `head = N(independent)` and that the matching saturates the head.
    pub fn validate<D: DegreeInt>(&self, node: &SearchNode<D>, g: &StaticGraph) -> Result<(), String> {
        let n = node.num_vertices();
        let mut in_i = vec![false; n];
        let mut in_h = vec![false; n];
        for &i in &self.independent {
            in_i[i as usize] = true;
        }
        for &h in &self.head {
            in_h[h as usize] = true;
        }
        if self.independent.is_empty() {
            return Err("empty independent side".into());
        }
        let mut nbh = vec![false; n];
        for &i in &self.independent {
            if !node.is_live(i) {
                return Err(format!("{i} is not live"));
            }
            for &u in g.neighbors(i) {
                if node.is_live(u) {
                    if in_i[u as usize] {
                        return Err(format!("edge ({i}, {u}) inside the independent side"));
                    }
                    nbh[u as usize] = true;
                }
            }
        }
        if nbh != in_h {
            return Err("head differs from the neighborhood of the independent side".into());
        }
        if self.matching.len() != self.head.len() {
            return Err(format!("matching has {} pairs for {} head vertices", self.matching.len(), self.head.len()));
        }
        let mut used_h = vec![false; n];
        let mut used_i = vec![false; n];
        for &(h, i) in &self.matching {
            if !in_h[h as usize] || !in_i[i as usize] || !g.has_edge(h, i) {
                return Err(format!("bad matching pair ({h}, {i})"));
            }
            if std::mem::replace(&mut used_h[h as usize], true) || std::mem::replace(&mut used_i[i as usize], true) {
                return Err(format!("matching pair ({h}, {i}) reuses a vertex"));
            }
        }
        Ok(())
    }
}

/// Finds a crown in the residual graph of `node`, or `None` when the construction yields none.
pub fn find_crown<D: DegreeInt>(node: &SearchNode<D>, g: &StaticGraph) -> Option<Crown> {
    let n = node.num_vertices();

    let mut matched = vec![false; n];
    for v in node.live_vertices() {
        if matched[v as usize] {
            continue;
        }
        if let Some(&u) = g.neighbors(v).iter().find(|&&u| node.is_live(u) && !matched[u as usize]) {
            matched[v as usize] = true;
            matched[u as usize] = true;
        }
    }

    let outsiders: Vec<Vertex> = node.live_vertices().filter(|&v| !matched[v as usize]).collect();
    if outsiders.is_empty() {
        return None;
    }

    // bipartite graph: left = outsiders, right = their live neighbors
    let mut right_index = vec![NIL; n];
    let mut right: Vec<Vertex> = Vec::new();
    let mut adj_offsets = Vec::with_capacity(outsiders.len() + 1);
    let mut adj = Vec::new();
    adj_offsets.push(0);
    for &o in &outsiders {
        for &u in g.neighbors(o) {
            if node.is_live(u) {
                if right_index[u as usize] == NIL {
                    right_index[u as usize] = right.len() as u32;
                    right.push(u);
                }
                adj.push(right_index[u as usize]);
            }
        }
        adj_offsets.push(adj.len());
    }
    let (pair_left, pair_right) = hopcroft_karp(outsiders.len(), right.len(), &adj_offsets, &adj);

    let mut in_i = vec![false; n];
    let mut in_h = vec![false; n];
    let mut queue: Vec<Vertex> = Vec::new();
    for (i, &o) in outsiders.iter().enumerate() {
        if pair_left[i] == NIL {
            in_i[o as usize] = true;
            queue.push(o);
        }
    }
    if queue.is_empty() {
        return None;
    }

    let mut independent = Vec::new();
    let mut head = Vec::new();
    let mut matching = Vec::new();
    while let Some(i) = queue.pop() {
        independent.push(i);
        for &h in g.neighbors(i) {
            if !node.is_live(h) || in_h[h as usize] {
                continue;
            }
            in_h[h as usize] = true;
            head.push(h);
            let mate = pair_right[right_index[h as usize] as usize];
            debug_assert_ne!(mate, NIL, "unmatched head vertex implies an augmenting path");
            let mate = outsiders[mate as usize];
            matching.push((h, mate));
            if !in_i[mate as usize] {
                in_i[mate as usize] = true;
                queue.push(mate);
            }
        }
    }
    independent.sort_unstable();
    head.sort_unstable();
    matching.sort_unstable();
    Some(Crown { independent, head, matching })
}

/// Maximum bipartite matching. Returns `(pair_left, pair_right)` with `NIL` for unmatched.
fn hopcroft_karp(num_left: usize, num_right: usize, offsets: &[usize], adj: &[u32]) -> (Vec<u32>, Vec<u32>) {
    const INF: u32 = u32::MAX;
    let mut pair_left = vec![NIL; num_left];
    let mut pair_right = vec![NIL; num_right];
    let mut dist = vec![INF; num_left];
    let mut next = vec![0usize; num_left];
    let mut queue = Vec::with_capacity(num_left);
    let mut stack: Vec<u32> = Vec::new();
    let mut via: Vec<u32> = Vec::new();

    loop {
        queue.clear();
        for l in 0..num_left {
            if pair_left[l] == NIL {
                dist[l] = 0;
                queue.push(l as u32);
            } else {
                dist[l] = INF;
            }
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let l = queue[head] as usize;
            head += 1;
            for &r in &adj[offsets[l]..offsets[l + 1]] {
                let l2 = pair_right[r as usize];
                if l2 == NIL {
                    found = true;
                } else if dist[l2 as usize] == INF {
                    dist[l2 as usize] = dist[l] + 1;
                    queue.push(l2);
                }
            }
        }
        if !found {
            break;
        }

        next.iter_mut().enumerate().for_each(|(l, x)| *x = offsets[l]);
        for root in 0..num_left {
            if pair_left[root] != NIL {
                continue;
            }
            stack.clear();
            via.clear();
            stack.push(root as u32);
            while let Some(&l) = stack.last() {
                let l = l as usize;
                if next[l] == offsets[l + 1] {
                    dist[l] = INF;
                    stack.pop();
                    via.pop();
                    continue;
                }
                let r = adj[next[l]];
                next[l] += 1;
                let l2 = pair_right[r as usize];
                if l2 == NIL {
                    via.push(r);
                    for (&l, &r) in stack.iter().zip(&via) {
                        pair_left[l as usize] = r;
                        pair_right[r as usize] = l;
                    }
                    break;
                }
                if dist[l2 as usize] == dist[l] + 1 {
                    via.push(r);
                    stack.push(l2);
                }
            }
        }
    }
    (pair_left, pair_right)
}
