//! Sequential search that returns an actual minimum cover, used when a witness is requested.

use fixedbitset::FixedBitSet;

use crate::graph::{StaticGraph, Vertex};
use crate::node::SearchNode;
use crate::reduce::{classify_component, reduce_to_fixpoint, ComponentKind};
use crate::registry::ChildIdx;

use super::search::{exceeds_edge_bound, select_max_degree};

const STACK_BYTES: usize = 512 << 20;

/// A minimum cover of `g` among those smaller than `limit`, as sorted vertex ids.
pub(crate) fn min_cover_below(g: &StaticGraph, limit: u32) -> Option<Vec<Vertex>> {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(s, || {
                let root = SearchNode::<u32>::root(g, ChildIdx::ROOT).with_inclusion();
                search(g, root, limit).map(|set| set.ones().map(|v| v as Vertex).collect())
            })
            .expect("spawn cover search thread")
            .join()
            .expect("cover search panicked")
    })
}

/// Cover of the node's residual graph plus its partial cover, smaller than `limit` and
/// minimum among those; `None` when no such cover exists.
fn search(g: &StaticGraph, mut node: SearchNode<u32>, limit: u32) -> Option<FixedBitSet> {
    reduce_to_fixpoint(&mut node, g, limit);
    let size = node.solution_size();
    if size >= limit || exceeds_edge_bound(node.edges_remaining(), limit - size - 1) {
        return None;
    }
    if node.edges_remaining() == 0 {
        return node.inclusion().cloned();
    }
    let components = components(g, &node);
    if components.len() > 1 {
        let mut cover = node.inclusion().unwrap().clone();
        let mut used = size;
        for comp in &components {
            let sub = SearchNode::component(&node, comp, ChildIdx::ROOT);
            let part = match classify_component(&sub, comp) {
                ComponentKind::General => search(g, sub, limit - used)?,
                kind => special_cover(g, &sub, comp, kind),
            };
            used += part.count_ones(..) as u32;
            if used >= limit {
                return None;
            }
            cover.union_with(&part);
        }
        return Some(cover);
    }

    let v = select_max_degree(&node).unwrap();
    let mut exclude = node.clone();
    let mut include = node;
    include.remove_vertex(g, v, true);
    include.recompute_bounds();
    for &u in g.neighbors(v) {
        if exclude.is_live(u) {
            exclude.remove_vertex(g, u, true);
        }
    }
    exclude.recompute_bounds();
    let first = search(g, include, limit);
    let limit = first.as_ref().map_or(limit, |c| c.count_ones(..) as u32);
    search(g, exclude, limit).or(first)
}

fn components(g: &StaticGraph, node: &SearchNode<u32>) -> Vec<Vec<Vertex>> {
    let mut seen = vec![false; node.num_vertices()];
    let mut out = Vec::new();
    for s in node.live_vertices() {
        if seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        let mut comp = vec![s];
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &u in g.neighbors(v) {
                if node.is_live(u) && !seen[u as usize] {
                    seen[u as usize] = true;
                    comp.push(u);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Explicit optimal cover of a clique (all but its last vertex) or a chordless cycle
/// (every other vertex along the cycle, plus the closing one when odd).
fn special_cover(g: &StaticGraph, node: &SearchNode<u32>, comp: &[Vertex], kind: ComponentKind) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(node.num_vertices());
    match kind {
        ComponentKind::Clique => comp[..comp.len() - 1].iter().for_each(|&v| set.insert(v as usize)),
        _ => {
            let mut order = vec![comp[0]];
            let mut prev = comp[0];
            let mut cur = node.live_neighbor(g, comp[0]).unwrap();
            while cur != comp[0] {
                order.push(cur);
                let next = g.neighbors(cur).iter().copied().find(|&u| node.is_live(u) && u != prev).unwrap();
                prev = cur;
                cur = next;
            }
            for (i, &v) in order.iter().enumerate() {
                if i % 2 == 1 || (order.len() % 2 == 1 && i == order.len() - 1) {
                    set.insert(v as usize);
                }
            }
        }
    }
    set
}
