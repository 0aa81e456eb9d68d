//! Exact MVC and PVC solving: root preprocessing, the parallel search and cover recording.

mod record;
mod search;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{StaticGraph, Vertex};
use crate::node::DegreeWidth;
use crate::oracle::greedy_cover_size;
use crate::preprocess::{self, Preprocessed};
use crate::reduce::RuleCounts;
use crate::registry::RegistryAudit;

pub use search::{exceeds_edge_bound, select_max_degree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Minimum vertex cover.
    Mvc,
    /// Is there a cover of at most `k` vertices?
    Pvc { k: u32 },
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub mode: Mode,
    pub workers: usize,
    pub components: bool,
    pub root_reduce: bool,
    pub bounds: bool,
    pub crown: bool,
    pub width: Option<DegreeWidth>,
    /// Offload to the shared worklist while it holds fewer nodes than this. Defaults to twice the workers.
    pub worklist_threshold: Option<usize>,
    /// Off: workers keep everything on their private stacks once the initial nodes are handed out.
    pub load_balance: bool,
    pub record_cover: bool,
    /// One worker, strict depth-first order, reproducible statistics.
    pub deterministic: bool,
    pub timeout: Option<Duration>,
    /// The stopping condition. Off only for cross-checking that pruning is safe.
    pub prune: bool,
    pub registry_capacity: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Mode::Mvc,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            components: true,
            root_reduce: true,
            bounds: true,
            crown: true,
            width: None,
            worklist_threshold: None,
            load_balance: true,
            record_cover: false,
            deterministic: false,
            timeout: None,
            prune: true,
            registry_capacity: 1 << 26,
        }
    }
}

impl SolverConfig {
    pub fn mvc() -> Self {
        SolverConfig::default()
    }

    pub fn pvc(k: u32) -> Self {
        SolverConfig { mode: Mode::Pvc { k }, ..SolverConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("at least one worker is required".into()));
        }
        if self.worklist_threshold == Some(0) {
            return Err(Error::Config("worklist threshold must be positive".into()));
        }
        if self.registry_capacity == 0 {
            return Err(Error::Config("registry capacity must be positive".into()));
        }
        Ok(())
    }

    pub fn effective_workers(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.workers
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PhaseSeconds {
    pub root_reduce: f64,
    pub search: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Stats {
    pub tree_nodes_visited: u64,
    pub component_branches: u64,
    /// Components found by a split, mapped to how many splits found that many.
    pub components_per_branch: BTreeMap<usize, u64>,
    pub rule_counts: RuleCounts,
    pub root_vertices_before: usize,
    pub root_vertices_after: usize,
    pub degree_width: u32,
    pub max_stack_depth: usize,
    pub worklist_pushes: u64,
    pub worklist_pops: u64,
    pub phase_seconds: PhaseSeconds,
}

impl Stats {
    /// The statistics with wall-clock timings zeroed, for comparing runs.
    pub fn without_timings(&self) -> Stats {
        Stats { phase_seconds: PhaseSeconds::default(), ..self.clone() }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// MVC: the minimum, or the best cover found before a timeout. PVC: the size of
    /// the cover found, if any.
    pub cover_size: Option<u32>,
    /// PVC: a cover of at most `k` vertices exists. Always true for MVC.
    pub found: bool,
    /// False when the search stopped on the timeout.
    pub exact: bool,
    /// Original vertex ids, sorted.
    pub cover: Option<Vec<Vertex>>,
    pub stats: Stats,
    /// Registry state after the search. Quiescence only holds when the search ran to completion.
    pub audit: RegistryAudit,
    /// The search ended early: PVC target reached or timeout.
    pub stopped_early: bool,
}

/// Solves MVC or PVC on `g` exactly.
pub fn solve(g: &StaticGraph, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let start = Instant::now();
    let deadline = config.timeout.map(|t| start + t);
    let workers = config.effective_workers();

    let pre = if config.root_reduce {
        let greedy = greedy_cover_size(g);
        let keep = match config.mode {
            Mode::Mvc => greedy,
            Mode::Pvc { k } => k.min(greedy),
        };
        preprocess::root_reduce(g, keep, config.crown, config.width)?
    } else {
        preprocess::identity(g, config.width)?
    };
    let forced = pre.forced_at_root();
    let greedy = pre.initial_upper_bound();
    let mut stats = Stats {
        rule_counts: pre.rule_counts,
        root_vertices_before: pre.vertices_before,
        root_vertices_after: pre.reduced.num_vertices(),
        degree_width: pre.width.bits(),
        phase_seconds: PhaseSeconds { root_reduce: pre.seconds, search: 0.0 },
        ..Stats::default()
    };

    // cover size the search has to reach in the reduced graph, PVC only
    let target = match config.mode {
        Mode::Mvc => None,
        Mode::Pvc { k } => match k.checked_sub(forced) {
            Some(t) => Some(t),
            None => {
                return Ok(SolveResult {
                    cover_size: None,
                    found: false,
                    exact: true,
                    cover: None,
                    stats,
                    audit: RegistryAudit { quiescent: true, conserved: true, ..Default::default() },
                    stopped_early: false,
                })
            }
        },
    };

    let search_start = Instant::now();
    let mut best = greedy;
    let mut exact = true;
    let mut stopped_early = false;
    let mut audit = RegistryAudit { quiescent: true, conserved: true, ..Default::default() };
    let settled = match target {
        None => greedy == 0,
        Some(t) => greedy <= t,
    };
    if !settled {
        let (root_best, root_achieved) = match target {
            None => (greedy, true),
            Some(t) => (t + 1, false),
        };
        let params = search::SearchParams {
            root_best,
            root_achieved,
            target,
            workers,
            components: config.components,
            bounds: config.bounds,
            prune: config.prune,
            load_balance: config.load_balance,
            threshold: config.worklist_threshold.unwrap_or(2 * workers),
            registry_capacity: config.registry_capacity,
            deadline,
        };
        let out = match pre.width {
            DegreeWidth::W8 => search::run::<u8>(&pre.reduced, &params)?,
            DegreeWidth::W16 => search::run::<u16>(&pre.reduced, &params)?,
            DegreeWidth::W32 => search::run::<u32>(&pre.reduced, &params)?,
        };
        best = best.min(out.best);
        exact = !out.timed_out;
        stopped_early = out.timed_out || out.stopped_on_target;
        audit = out.audit;
        stats.tree_nodes_visited = out.stats.tree_nodes;
        stats.component_branches = out.stats.component_branches;
        stats.components_per_branch = out.stats.components_per_branch;
        stats.rule_counts += out.stats.rules;
        stats.max_stack_depth = out.stats.max_stack_depth;
        stats.worklist_pushes = out.stats.pushes;
        stats.worklist_pops = out.stats.pops;
    }
    stats.phase_seconds.search = search_start.elapsed().as_secs_f64();

    let found = target.map_or(true, |t| best <= t);
    let mut cover_size = found.then_some(forced + best);
    let mut cover = None;
    if config.record_cover && found {
        if let Some(c) = record_cover(&pre, best, exact)? {
            if !g.is_vertex_cover(&c) {
                return Err(Error::Internal("recorded cover misses an edge".into()));
            }
            if target.is_none() && c.len() as u32 != forced + best {
                return Err(Error::Internal(format!("recorded cover has {} vertices, expected {}", c.len(), forced + best)));
            }
            cover_size = Some(c.len() as u32);
            cover = Some(c);
        }
    }

    Ok(SolveResult { cover_size, found, exact, cover, stats, audit, stopped_early })
}

/// A cover of the original graph with `forced + best` or fewer vertices.
fn record_cover(pre: &Preprocessed, best: u32, exact: bool) -> Result<Option<Vec<Vertex>>> {
    if best == pre.initial_upper_bound() {
        return Ok(Some(pre.lift_cover(pre.greedy.iter().copied())));
    }
    if !exact {
        return Ok(None);
    }
    match record::min_cover_below(&pre.reduced, best + 1) {
        Some(c) => Ok(Some(pre.lift_cover(c))),
        None => Err(Error::Internal(format!("no cover of size {best} found while recording"))),
    }
}
