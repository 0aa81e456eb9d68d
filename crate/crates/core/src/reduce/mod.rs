//! Reduction rules.
//!
//! The lightweight rules (degree one, degree-two triangle, high degree) run at every
//! search node. Clique and chordless-cycle rules solve whole components once the
//! residual graph splits. The crown rule is heavier and only runs during root
//! preprocessing.

mod crown;

use std::ops::AddAssign;

use serde::Serialize;

use crate::graph::{StaticGraph, Vertex};
use crate::node::{DegreeInt, SearchNode};

pub use crown::{find_crown, Crown};

/// How many times each rule fired.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RuleCounts {
    pub degree_one: u64,
    pub degree_two_triangle: u64,
    pub high_degree: u64,
    pub clique: u64,
    pub chordless_cycle: u64,
    pub crown: u64,
}

impl AddAssign for RuleCounts {
    fn add_assign(&mut self, o: Self) {
        self.degree_one += o.degree_one;
        self.degree_two_triangle += o.degree_two_triangle;
        self.high_degree += o.high_degree;
        self.clique += o.clique;
        self.chordless_cycle += o.chordless_cycle;
        self.crown += o.crown;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReductionOutcome {
    /// Vertices the rules added to the cover.
    pub vertices_forced: u32,
    pub rules: RuleCounts,
}

impl ReductionOutcome {
    pub fn changed(&self) -> bool {
        self.vertices_forced > 0
    }
}

impl AddAssign for ReductionOutcome {
    fn add_assign(&mut self, o: Self) {
        self.vertices_forced += o.vertices_forced;
        self.rules += o.rules;
    }
}

fn degree_one_pass<D: DegreeInt>(node: &mut SearchNode<D>, g: &StaticGraph, out: &mut ReductionOutcome) -> bool {
    // act on the vertices that had degree one when the sweep started
    let pending: Vec<Vertex> = node.range().filter(|&v| node.degree(v as Vertex) == 1).map(|v| v as Vertex).collect();
    let mut changed = false;
    for v in pending {
        if node.degree(v) == 1 {
            let u = node.live_neighbor(g, v).expect("degree-one vertex has a live neighbor");
            node.remove_vertex(g, u, true);
            out.vertices_forced += 1;
            out.rules.degree_one += 1;
            changed = true;
        }
    }
    changed
}

fn degree_two_triangle_pass<D: DegreeInt>(
    node: &mut SearchNode<D>,
    g: &StaticGraph,
    out: &mut ReductionOutcome,
) -> bool {
    let mut changed = false;
    for v in node.range() {
        let v = v as Vertex;
        if node.degree(v) != 2 {
            continue;
        }
        let (a, b) = {
            let mut live = g.neighbors(v).iter().copied().filter(|&u| node.is_live(u));
            (live.next().unwrap(), live.next().unwrap())
        };
        if g.has_edge(a, b) {
            node.remove_vertex(g, a, true);
            node.remove_vertex(g, b, true);
            out.vertices_forced += 2;
            out.rules.degree_two_triangle += 1;
            changed = true;
        }
    }
    changed
}

/// Vertices still allowed into the cover if it is to stay below `limit`.
#[inline]
fn remaining_budget<D: DegreeInt>(node: &SearchNode<D>, limit: u32) -> Option<usize> {
    (limit as i64 - node.solution_size() as i64 - 1).try_into().ok()
}

fn high_degree_pass<D: DegreeInt>(
    node: &mut SearchNode<D>,
    g: &StaticGraph,
    limit: u32,
    out: &mut ReductionOutcome,
) -> bool {
    let mut changed = false;
    for v in node.range() {
        let Some(budget) = remaining_budget(node, limit) else { break };
        if node.degree(v as Vertex) > budget {
            node.remove_vertex(g, v as Vertex, true);
            out.vertices_forced += 1;
            out.rules.high_degree += 1;
            changed = true;
        }
    }
    changed
}

/// Degree-one rule to fixpoint: the neighbor of a degree-one vertex joins the cover.
pub fn apply_degree_one<D: DegreeInt>(node: &mut SearchNode<D>, g: &StaticGraph) -> ReductionOutcome {
    let mut out = ReductionOutcome::default();
    while degree_one_pass(node, g, &mut out) {}
    node.recompute_bounds();
    out
}

/// Degree-two triangle rule to fixpoint: both neighbors of a degree-two vertex join
/// the cover when they are adjacent.
pub fn apply_degree_two_triangle<D: DegreeInt>(node: &mut SearchNode<D>, g: &StaticGraph) -> ReductionOutcome {
    let mut out = ReductionOutcome::default();
    while degree_two_triangle_pass(node, g, &mut out) {}
    node.recompute_bounds();
    out
}

/// High-degree rule to fixpoint.
///
/// `limit` is the cover size to beat: only covers smaller than `limit` are preserved.
/// A vertex whose degree exceeds `limit - |S| - 1` must be in any such cover. The budget
/// is re-evaluated as the partial cover grows. Nothing happens once `|S| >= limit`.
pub fn apply_high_degree<D: DegreeInt>(node: &mut SearchNode<D>, g: &StaticGraph, limit: u32) -> ReductionOutcome {
    let mut out = ReductionOutcome::default();
    while high_degree_pass(node, g, limit, &mut out) {}
    node.recompute_bounds();
    out
}

/// Runs degree one, degree-two triangle and high degree in that order until a full
/// sweep changes nothing, then tightens the bounds.
pub fn reduce_to_fixpoint<D: DegreeInt>(node: &mut SearchNode<D>, g: &StaticGraph, limit: u32) -> ReductionOutcome {
    let mut out = ReductionOutcome::default();
    loop {
        let mut changed = degree_one_pass(node, g, &mut out);
        changed |= degree_two_triangle_pass(node, g, &mut out);
        changed |= high_degree_pass(node, g, limit, &mut out);
        if !changed || node.edges_remaining() == 0 {
            break;
        }
        node.recompute_bounds();
    }
    node.recompute_bounds();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    Clique,
    ChordlessCycle,
    General,
}

impl ComponentKind {
    /// Minimum cover of a special component with `size` vertices: all but one vertex of a
    /// clique, half of a cycle rounded up. `None` for general components.
    pub fn cover_size(self, size: usize) -> Option<u32> {
        match self {
            ComponentKind::Clique => Some(size as u32 - 1),
            ComponentKind::ChordlessCycle => Some(size.div_ceil(2) as u32),
            ComponentKind::General => None,
        }
    }
}

/// Classifies a connected set of live vertices by its residual degrees.
///
/// The clique test runs first, so a triangle is a clique.
pub fn classify_component<D: DegreeInt>(node: &SearchNode<D>, component: &[Vertex]) -> ComponentKind {
    let size = component.len();
    if size >= 2 && component.iter().all(|&v| node.degree(v) == size - 1) {
        ComponentKind::Clique
    } else if size >= 3 && component.iter().all(|&v| node.degree(v) == 2) {
        ComponentKind::ChordlessCycle
    } else {
        ComponentKind::General
    }
}
