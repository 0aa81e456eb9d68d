//! Root preprocessing: exhaustive reduction, crown, induced subgraph and degree width.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{StaticGraph, Vertex};
use crate::node::{DegreeWidth, SearchNode};
use crate::oracle::greedy_cover;
use crate::reduce::{find_crown, reduce_to_fixpoint, RuleCounts};
use crate::registry::ChildIdx;

#[derive(Debug, Clone)]
pub struct Preprocessed {
    /// Residual graph induced on the vertices that still have edges.
    pub reduced: StaticGraph,
    /// Reduced index to original vertex id.
    pub vertex_map: Vec<Vertex>,
    /// Original ids of the vertices forced into the cover.
    pub forced: Vec<Vertex>,
    /// Greedy cover of the reduced graph, in reduced indices.
    pub greedy: Vec<Vertex>,
    pub width: DegreeWidth,
    /// Private stack capacity per worker.
    pub max_stack_depth: usize,
    pub rule_counts: RuleCounts,
    pub vertices_before: usize,
    pub seconds: f64,
}

impl Preprocessed {
    pub fn forced_at_root(&self) -> u32 {
        self.forced.len() as u32
    }

    /// Size of the greedy cover of the reduced graph.
    pub fn initial_upper_bound(&self) -> u32 {
        self.greedy.len() as u32
    }

    /// Maps a cover of the reduced graph to original ids and adds the forced vertices.
    pub fn lift_cover(&self, reduced_cover: impl IntoIterator<Item = Vertex>) -> Vec<Vertex> {
        let mut cover: Vec<Vertex> =
            reduced_cover.into_iter().map(|v| self.vertex_map[v as usize]).chain(self.forced.iter().copied()).collect();
        cover.sort_unstable();
        cover
    }
}

/// Smallest width whose largest value stays above `max_degree`, unless overridden.
pub fn select_width(max_degree: usize, requested: Option<DegreeWidth>) -> Result<DegreeWidth> {
    match requested {
        Some(w) if w.fits(max_degree) => Ok(w),
        Some(w) => Err(Error::Unsupported(format!(
            "maximum degree {max_degree} does not fit {}-bit degree entries",
            w.bits()
        ))),
        None => DegreeWidth::ALL
            .into_iter()
            .find(|w| w.fits(max_degree))
            .ok_or_else(|| Error::Unsupported(format!("maximum degree {max_degree} exceeds 32-bit degree entries"))),
    }
}

/// Reduces `g` at the root and induces the subgraph the search runs on.
///
/// Every cover of size at most `keep_covers_up_to` survives the reduction: the high-degree
/// rule only forces vertices that belong to all such covers. The lightweight rules and,
/// if enabled, the crown rule alternate until neither changes the graph.
pub fn root_reduce(
    g: &StaticGraph,
    keep_covers_up_to: u32,
    crown: bool,
    width: Option<DegreeWidth>,
) -> Result<Preprocessed> {
    let start = Instant::now();
    let mut node = SearchNode::<u32>::root(g, ChildIdx::ROOT).with_inclusion();
    let mut rule_counts = RuleCounts::default();
    let limit = keep_covers_up_to.saturating_add(1);
    loop {
        rule_counts += reduce_to_fixpoint(&mut node, g, limit).rules;
        if !crown || node.edges_remaining() == 0 {
            break;
        }
        match find_crown(&node, g) {
            Some(c) => {
                c.apply(&mut node, g);
                rule_counts.crown += 1;
            }
            None => break,
        }
    }

    let keep: Vec<Vertex> = node.live_vertices().collect();
    let forced: Vec<Vertex> = node.inclusion().unwrap().ones().map(|v| v as Vertex).collect();
    let (reduced, vertex_map) = g.induced_subgraph(&keep)?;
    finish(g, reduced, vertex_map, forced, rule_counts, width, start)
}

/// The search graph without any root reduction: `g` itself.
pub fn identity(g: &StaticGraph, width: Option<DegreeWidth>) -> Result<Preprocessed> {
    let start = Instant::now();
    let vertex_map = (0..g.num_vertices() as Vertex).collect();
    finish(g, g.clone(), vertex_map, Vec::new(), RuleCounts::default(), width, start)
}

fn finish(
    original: &StaticGraph,
    reduced: StaticGraph,
    vertex_map: Vec<Vertex>,
    forced: Vec<Vertex>,
    rule_counts: RuleCounts,
    width: Option<DegreeWidth>,
    start: Instant,
) -> Result<Preprocessed> {
    let width = select_width(reduced.max_degree(), width)?;
    let greedy = greedy_cover(&reduced);
    Ok(Preprocessed {
        max_stack_depth: reduced.num_vertices().max(1),
        reduced,
        vertex_map,
        forced,
        greedy,
        width,
        rule_counts,
        vertices_before: original.num_vertices(),
        seconds: start.elapsed().as_secs_f64(),
    })
}
