//! Worker pool running the branch-and-reduce search over one reduced graph.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crossbeam_queue::SegQueue;

use crate::error::{Error, Result};
use crate::graph::{StaticGraph, Vertex};
use crate::node::{DegreeInt, SearchNode};
use crate::reduce::{classify_component, reduce_to_fixpoint, ComponentKind, RuleCounts};
use crate::registry::{ChildIdx, ParentIdx, Registry, RegistryAudit};

#[derive(Debug, Clone)]
pub(crate) struct SearchParams {
    pub root_best: u32,
    pub root_achieved: bool,
    /// PVC: stop as soon as the root scope reaches a cover of at most this size.
    pub target: Option<u32>,
    pub workers: usize,
    pub components: bool,
    pub bounds: bool,
    pub prune: bool,
    pub load_balance: bool,
    pub threshold: usize,
    pub registry_capacity: usize,
    pub deadline: Option<Instant>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct SearchStats {
    pub tree_nodes: u64,
    pub component_branches: u64,
    pub components_per_branch: BTreeMap<usize, u64>,
    pub rules: RuleCounts,
    pub max_stack_depth: usize,
    pub pushes: u64,
    pub pops: u64,
}

impl SearchStats {
    fn merge(&mut self, other: SearchStats) {
        self.tree_nodes += other.tree_nodes;
        self.component_branches += other.component_branches;
        for (k, v) in other.components_per_branch {
            *self.components_per_branch.entry(k).or_default() += v;
        }
        self.rules += other.rules;
        self.max_stack_depth = self.max_stack_depth.max(other.max_stack_depth);
        self.pushes += other.pushes;
        self.pops += other.pops;
    }
}

#[derive(Debug)]
pub(crate) struct SearchOutcome {
    /// Final best of the root scope.
    pub best: u32,
    pub stopped_on_target: bool,
    pub timed_out: bool,
    pub stats: SearchStats,
    pub audit: RegistryAudit,
}

struct Shared<'g, D> {
    g: &'g StaticGraph,
    params: &'g SearchParams,
    registry: Registry,
    worklist: SegQueue<SearchNode<D>>,
    done: AtomicBool,
    stop: AtomicBool,
    timed_out: AtomicBool,
    on_target: AtomicBool,
    seeded: AtomicUsize,
    error: Mutex<Option<Error>>,
}

impl<D> Shared<'_, D> {
    fn halted(&self) -> bool {
        self.done.load(Ordering::Acquire) || self.stop.load(Ordering::Acquire)
    }

    fn fail(&self, e: Error) {
        self.error.lock().unwrap().get_or_insert(e);
        self.stop.store(true, Ordering::Release);
    }
}

pub(crate) fn run<D: DegreeInt>(g: &StaticGraph, params: &SearchParams) -> Result<SearchOutcome> {
    let shared = Shared {
        g,
        params,
        registry: Registry::new(params.root_best, params.root_achieved, params.registry_capacity),
        worklist: SegQueue::new(),
        done: AtomicBool::new(false),
        stop: AtomicBool::new(false),
        timed_out: AtomicBool::new(false),
        on_target: AtomicBool::new(false),
        seeded: AtomicUsize::new(0),
        error: Mutex::new(None),
    };
    shared.worklist.push(SearchNode::<D>::root(g, ChildIdx::ROOT).with_bounds(params.bounds));
    let mut stats = SearchStats { pushes: 1, ..Default::default() };

    let per_worker: Vec<SearchStats> = std::thread::scope(|s| {
        let handles: Vec<_> =
            (0..params.workers).map(|_| s.spawn(|| Worker::new(&shared).run())).collect();
        handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
    });
    for w in per_worker {
        stats.merge(w);
    }
    if let Some(e) = shared.error.into_inner().unwrap() {
        return Err(e);
    }
    Ok(SearchOutcome {
        best: shared.registry.best(ChildIdx::ROOT),
        stopped_on_target: shared.on_target.load(Ordering::Acquire),
        timed_out: shared.timed_out.load(Ordering::Acquire),
        stats,
        audit: shared.registry.audit(),
    })
}

/// Lowest-index vertex of maximum residual degree.
pub fn select_max_degree<D: DegreeInt>(node: &SearchNode<D>) -> Option<Vertex> {
    let mut best: Option<(usize, usize)> = None;
    for v in node.range() {
        let d = node.degree(v as Vertex);
        if d > 0 && best.map_or(true, |(bd, _)| d > bd) {
            best = Some((d, v));
        }
    }
    best.map(|(_, v)| v as Vertex)
}

/// True when a residual graph with `edges` edges cannot be covered by `budget` more
/// vertices of degree at most `budget`.
#[inline]
pub fn exceeds_edge_bound(edges: usize, budget: u32) -> bool {
    edges as u64 > budget as u64 * budget as u64
}

struct Worker<'s, 'g, D> {
    sh: &'s Shared<'g, D>,
    stack: Vec<SearchNode<D>>,
    stack_cap: usize,
    stats: SearchStats,
    visited: Vec<u32>,
    stamp: u32,
    scratch: Vec<usize>,
}

impl<'s, 'g, D: DegreeInt> Worker<'s, 'g, D> {
    fn new(sh: &'s Shared<'g, D>) -> Self {
        let n = sh.g.num_vertices();
        Worker { sh, stack: Vec::new(), stack_cap: n.max(1), stats: SearchStats::default(), visited: vec![0; n], stamp: 0, scratch: vec![0; n] }
    }

    fn run(mut self) -> SearchStats {
        let mut current: Option<SearchNode<D>> = None;
        let mut idle = 0u32;
        loop {
            if self.sh.halted() {
                break;
            }
            let next = current.take().or_else(|| self.stack.pop()).or_else(|| {
                let n = self.sh.worklist.pop();
                self.stats.pops += n.is_some() as u64;
                n
            });
            let Some(node) = next else {
                backoff(&mut idle);
                continue;
            };
            idle = 0;
            if let Some(deadline) = self.sh.params.deadline {
                if Instant::now() >= deadline {
                    self.sh.timed_out.store(true, Ordering::Release);
                    self.sh.stop.store(true, Ordering::Release);
                    break;
                }
            }
            match self.process(node) {
                Ok(next) => current = next,
                Err(e) => {
                    self.sh.fail(e);
                    break;
                }
            }
        }
        self.stats
    }

    /// Handles one node; returns the child to continue with, if any.
    fn process(&mut self, mut node: SearchNode<D>) -> Result<Option<SearchNode<D>>> {
        let (g, reg, params) = (self.sh.g, &self.sh.registry, self.sh.params);
        self.stats.tree_nodes += 1;
        let scope = node.scope();
        let best = reg.best(scope);
        self.stats.rules += reduce_to_fixpoint(&mut node, g, best).rules;

        let size = node.solution_size();
        if params.prune && (size >= best || exceeds_edge_bound(node.edges_remaining(), best - size - 1)) {
            self.finish_node(scope);
            return Ok(None);
        }
        if node.edges_remaining() == 0 {
            let prev = reg.atomic_min_best(scope, size);
            if size < prev {
                self.improved(scope, prev, size);
            }
            self.finish_node(scope);
            return Ok(None);
        }
        let node = if params.components {
            match self.branch_on_components(node)? {
                Some(node) => node,
                None => return Ok(None),
            }
        } else {
            node
        };

        let v = select_max_degree(&node).expect("node with edges has a live vertex");
        reg.inc_live_nodes(scope);
        let depth = node.depth() + 1;
        let mut exclude = node.clone();
        let mut include = node;
        include.remove_vertex(g, v, true);
        include.recompute_bounds();
        include.set_depth(depth);
        for &u in g.neighbors(v) {
            if exclude.is_live(u) {
                exclude.remove_vertex(g, u, true);
            }
        }
        exclude.recompute_bounds();
        exclude.set_depth(depth);
        self.offload_or_push(exclude);
        Ok(Some(include))
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.visited.iter_mut().for_each(|x| *x = 0);
            self.stamp = 1;
        }
        self.stamp
    }

    fn bfs(&mut self, node: &SearchNode<D>, source: Vertex) -> Vec<Vertex> {
        debug_assert!(node.is_live(source), "component search from isolated vertex {source}");
        let stamp = self.stamp;
        self.visited[source as usize] = stamp;
        let mut comp = vec![source];
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &u in self.sh.g.neighbors(v) {
                if node.is_live(u) && self.visited[u as usize] != stamp {
                    self.visited[u as usize] = stamp;
                    comp.push(u);
                }
            }
        }
        comp
    }

    /// Splits a disconnected node into component scopes. Hands the node back when its
    /// residual graph is connected.
    fn branch_on_components(&mut self, node: SearchNode<D>) -> Result<Option<SearchNode<D>>> {
        let reg = &self.sh.registry;
        self.next_stamp();
        let source = node.live_vertices().next().expect("node with edges has a live vertex");
        let first = self.bfs(&node, source);
        let degree_sum: usize = first.iter().map(|&v| node.degree(v)).sum();
        if degree_sum == 2 * node.edges_remaining() {
            return Ok(Some(node));
        }

        let scope = node.scope();
        let parent = reg.new_parent(node.solution_size(), scope)?;
        self.stats.component_branches += 1;
        let mut count = 1;
        let mut hopeless = false;
        self.dispatch(&node, &first, parent, &mut hopeless)?;
        for v in (source as usize + 1)..=node.range().end().to_owned() {
            let v = v as Vertex;
            if node.is_live(v) && self.visited[v as usize] != self.stamp {
                let comp = self.bfs(&node, v);
                count += 1;
                self.dispatch(&node, &comp, parent, &mut hopeless)?;
            }
        }
        *self.stats.components_per_branch.entry(count).or_default() += 1;

        reg.finish_discovery(parent);
        if self.sh.params.target.is_some() {
            if let Some((anc, prev, total)) = self.offer_total(parent) {
                self.improved(anc, prev, total);
            }
        }
        if reg.dec_live_comps(parent) == 0 {
            if let Some(anc) = self.finalize(parent) {
                self.cascade(anc);
            }
        }
        Ok(None)
    }

    fn dispatch(&mut self, node: &SearchNode<D>, comp: &[Vertex], parent: ParentIdx, hopeless: &mut bool) -> Result<()> {
        let reg = &self.sh.registry;
        let kind = classify_component(node, comp);
        if let Some(cover) = kind.cover_size(comp.len()) {
            match kind {
                ComponentKind::Clique => self.stats.rules.clique += 1,
                _ => self.stats.rules.chordless_cycle += 1,
            }
            reg.fold_component(parent, cover);
            return Ok(());
        }
        if *hopeless {
            return Ok(());
        }
        let cap = reg.best(node.scope()).saturating_sub(reg.sum(parent));
        if cap == 0 {
            // the parent can no longer improve its scope; leave the rest undispatched
            *hopeless = true;
            reg.poison_total(parent);
            return Ok(());
        }
        let greedy = self.greedy_size(node, comp);
        let init = cap.min(greedy);
        let achieved = greedy <= cap;
        let child = reg.new_child(init, Some(parent), achieved)?;
        reg.inc_live_comps(parent);
        reg.add_total(parent, init, achieved);
        self.offload_or_push(SearchNode::component(node, comp, child));
        Ok(())
    }

    /// Size of the max-degree greedy cover of one residual component. Never more than
    /// `comp.len() - 1`: the last edge covered leaves its other endpoint out.
    fn greedy_size(&mut self, node: &SearchNode<D>, comp: &[Vertex]) -> u32 {
        let g = self.sh.g;
        let degree = &mut self.scratch;
        let mut heap: BinaryHeap<(usize, Reverse<Vertex>)> = comp
            .iter()
            .map(|&v| {
                degree[v as usize] = node.degree(v);
                (degree[v as usize], Reverse(v))
            })
            .collect();
        let mut size = 0;
        while let Some((d, Reverse(v))) = heap.pop() {
            if d == 0 || degree[v as usize] != d {
                continue;
            }
            size += 1;
            degree[v as usize] = 0;
            for &u in g.neighbors(v) {
                if node.is_live(u) && degree[u as usize] > 0 {
                    degree[u as usize] -= 1;
                    if degree[u as usize] > 0 {
                        heap.push((degree[u as usize], Reverse(u)));
                    }
                }
            }
        }
        size
    }

    fn offload_or_push(&mut self, node: SearchNode<D>) {
        let params = self.sh.params;
        let to_worklist = if params.workers == 1 {
            false
        } else if !params.load_balance {
            let seeds = params.workers - 1;
            self.sh.seeded.load(Ordering::Relaxed) < seeds && self.sh.seeded.fetch_add(1, Ordering::Relaxed) < seeds
        } else {
            self.sh.worklist.len() < params.threshold
        };
        if to_worklist || self.stack.len() >= self.stack_cap {
            self.sh.worklist.push(node);
            self.stats.pushes += 1;
        } else {
            self.stack.push(node);
            self.stats.max_stack_depth = self.stats.max_stack_depth.max(self.stack.len());
        }
    }

    fn finish_node(&self, scope: ChildIdx) {
        if self.sh.registry.dec_live_nodes(scope) == 0 {
            self.cascade(scope);
        }
    }

    /// Completion of scope `child`: folds its best into the parent and, when the parent
    /// has no live components left, the parent's sum into the enclosing scope.
    fn cascade(&self, mut child: ChildIdx) {
        let reg = &self.sh.registry;
        loop {
            let Some(parent) = reg.parent_of(child) else {
                self.sh.done.store(true, Ordering::Release);
                return;
            };
            reg.add_to_sum(parent, reg.best(child));
            if reg.dec_live_comps(parent) != 0 {
                return;
            }
            match self.finalize(parent) {
                Some(anc) => child = anc,
                None => return,
            }
        }
    }

    /// Returns the enclosing scope if this was its last live node.
    fn finalize(&self, parent: ParentIdx) -> Option<ChildIdx> {
        let reg = &self.sh.registry;
        let anc = reg.ancestor_of(parent);
        let sum = reg.sum(parent);
        let prev = reg.atomic_min_best(anc, sum);
        if sum < prev {
            self.improved(anc, prev, sum);
        }
        (reg.dec_live_nodes(anc) == 0).then_some(anc)
    }

    /// PVC upward propagation after `scope`'s best dropped from `prev` to `new`.
    fn improved(&self, mut scope: ChildIdx, mut prev: u32, mut new: u32) {
        let Some(target) = self.sh.params.target else { return };
        let reg = &self.sh.registry;
        loop {
            let Some(parent) = reg.parent_of(scope) else {
                if new <= target {
                    self.sh.on_target.store(true, Ordering::Release);
                    self.sh.stop.store(true, Ordering::Release);
                }
                return;
            };
            if reg.mark_achieved(scope) {
                reg.dec_unachieved(parent);
            }
            reg.sub_total(parent, prev - new);
            match self.offer_total(parent) {
                Some((anc, p, t)) => (scope, prev, new) = (anc, p, t),
                None => return,
            }
        }
    }

    /// Lowers the enclosing scope's best to the parent's total once that total is a found cover.
    fn offer_total(&self, parent: ParentIdx) -> Option<(ChildIdx, u32, u32)> {
        let reg = &self.sh.registry;
        let total = reg.achieved_total(parent)?;
        let anc = reg.ancestor_of(parent);
        let prev = reg.atomic_min_best(anc, total);
        (total < prev).then_some((anc, prev, total))
    }
}

fn backoff(idle: &mut u32) {
    *idle = idle.saturating_add(1);
    if *idle < 32 {
        std::hint::spin_loop();
    } else if *idle < 64 {
        std::thread::yield_now();
    } else {
        std::thread::sleep(Duration::from_micros(50));
    }
}
