//! Component branch registry.
//!
//! When a search node splits into components, the node that splits is not the one
//! that sees the components finish. The registry holds the shared bookkeeping that lets
//! whichever worker completes the last descendant of a component fold its result
//! into the splitting node, and the splitting node's result into the enclosing scope.
//!
//! Two entry kinds live in one append-only arena:
//!
//! * a child entry per component scope: `best` cover size known for the component,
//!   `live_nodes` still executing in it, and the index of the owning parent entry
//!   (absent for the root scope);
//! * a parent entry per splitting node: running `sum` of the splitting node's partial
//!   cover plus solved components, `live_comps` still unsolved (the splitting node
//!   counts itself while it is still discovering components), and the child entry of
//!   the scope the splitting node belongs to.
//!
//! Counter updates are lock-free atomics. The caller whose decrement observes zero
//! owns the follow-up work; exactly one caller can observe it.
//!
//! Parent entries also keep an early-termination view used by parameterized solving:
//! `total` is the parent's sum plus the current best of every dispatched component,
//! and `unachieved` counts components whose best is still a bound rather than the
//! size of a cover actually found.

use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU32, AtomicU8, AtomicUsize, Ordering};
use std::sync::OnceLock;

use crate::error::{Error, Result};

// chunk k holds 2^(FIRST_CHUNK_BITS + k) slots
const FIRST_CHUNK_BITS: u32 = 10;
const NUM_CHUNKS: usize = 33 - FIRST_CHUNK_BITS as usize;
const NONE: u32 = u32::MAX;

const KIND_CHILD: u8 = 1;
const KIND_PARENT: u8 = 2;

/// Index of a child (component scope) entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChildIdx(u32);

/// Index of a parent (splitting node) entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParentIdx(u32);

impl ChildIdx {
    /// The first entry of every registry is the root scope.
    pub const ROOT: ChildIdx = ChildIdx(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ParentIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Default)]
struct Slot {
    kind: AtomicU8,
    // child: best; parent: sum
    value: AtomicU32,
    // child: live nodes; parent: live components
    live: AtomicI64,
    // child: parent entry; parent: enclosing child entry
    link: AtomicU32,
    // parent: sum at creation
    initial: AtomicU32,
    // parent: cover added by components solved in place
    folded: AtomicU32,
    // parent: sum + current best of dispatched components
    total: AtomicU32,
    // parent: dispatched components whose best is not yet a found cover
    unachieved: AtomicU32,
    // parent: still discovering components
    discovering: AtomicBool,
    // child: best is the size of a cover actually found
    achieved: AtomicBool,
}

/// Append-only arena of registry entries.
///
/// Storage grows in chunks of doubling size; a chunk is allocated by whichever thread
/// first claims an index in it. Entries are never removed, so indices stay valid for the
/// registry's whole lifetime.
pub struct Registry {
    chunks: [OnceLock<Box<[Slot]>>; NUM_CHUNKS],
    len: AtomicUsize,
    capacity: usize,
}

impl std::fmt::Debug for Registry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Registry").field("len", &self.len()).field("capacity", &self.capacity).finish()
    }
}

/// Plain copy of one entry, for inspection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntrySnapshot {
    Child { best: u32, live_nodes: i64, parent: Option<ParentIdx>, achieved: bool },
    Parent { sum: u32, initial_sum: u32, folded: u32, live_comps: i64, ancestor: ChildIdx },
}

/// Result of auditing a registry after a solve.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegistryAudit {
    pub entries: usize,
    pub child_entries: usize,
    pub parent_entries: usize,
    /// Every live counter is back at zero.
    pub quiescent: bool,
    /// Every finalized parent's sum equals its initial sum plus folded components plus
    /// the final best of each child entry pointing at it.
    pub conserved: bool,
    /// Longest chain of nested component branches (0 when nothing split).
    pub max_nesting: usize,
    pub violations: Vec<String>,
}

/// Chunk and offset of entry `idx`.
#[inline]
fn locate(idx: u32) -> (usize, usize) {
    let shifted = idx as u64 + (1 << FIRST_CHUNK_BITS);
    let k = 63 - shifted.leading_zeros() - FIRST_CHUNK_BITS;
    (k as usize, (shifted - (1u64 << (FIRST_CHUNK_BITS + k))) as usize)
}

impl Registry {
    /// Creates a registry whose root scope starts with `root_best`.
    ///
    /// `capacity` bounds the number of entries; exceeding it is a resource error.
    pub fn new(root_best: u32, root_achieved: bool, capacity: usize) -> Self {
        let capacity = capacity.clamp(1, (NONE as usize) - 1);
        let registry = Registry { chunks: std::array::from_fn(|_| OnceLock::new()), len: AtomicUsize::new(0), capacity };
        let root = registry.new_child(root_best, None, root_achieved).expect("capacity ≥ 1");
        debug_assert_eq!(root, ChildIdx::ROOT);
        registry
    }

    pub fn len(&self) -> usize {
        self.len.load(Ordering::Acquire).min(self.capacity)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn claim(&self) -> Result<(u32, &Slot)> {
        let idx = self.len.fetch_add(1, Ordering::AcqRel);
        if idx >= self.capacity {
            return Err(Error::Resource(format!(
                "component branch registry is full ({} entries)",
                self.capacity
            )));
        }
        let (k, offset) = locate(idx as u32);
        let chunk = self.chunks[k]
            .get_or_init(|| (0..1usize << (FIRST_CHUNK_BITS as usize + k)).map(|_| Slot::default()).collect());
        Ok((idx as u32, &chunk[offset]))
    }

    #[inline]
    fn slot(&self, idx: u32) -> &Slot {
        let (k, offset) = locate(idx);
        let chunk = self.chunks[k].get().expect("registry index was never allocated");
        &chunk[offset]
    }

    #[inline]
    fn child(&self, idx: ChildIdx) -> &Slot {
        let slot = self.slot(idx.0);
        debug_assert_eq!(slot.kind.load(Ordering::Relaxed), KIND_CHILD);
        slot
    }

    #[inline]
    fn parent(&self, idx: ParentIdx) -> &Slot {
        let slot = self.slot(idx.0);
        debug_assert_eq!(slot.kind.load(Ordering::Relaxed), KIND_PARENT);
        slot
    }

    /// Appends a component scope with one live node (the component's own root node).
    pub fn new_child(&self, best: u32, parent: Option<ParentIdx>, achieved: bool) -> Result<ChildIdx> {
        let (idx, slot) = self.claim()?;
        slot.value.store(best, Ordering::Relaxed);
        slot.live.store(1, Ordering::Relaxed);
        slot.link.store(parent.map_or(NONE, |p| p.0), Ordering::Relaxed);
        slot.achieved.store(achieved, Ordering::Relaxed);
        slot.kind.store(KIND_CHILD, Ordering::Release);
        Ok(ChildIdx(idx))
    }

    /// Appends the entry of a splitting node; it starts with one live component, itself.
    pub fn new_parent(&self, sum: u32, ancestor: ChildIdx) -> Result<ParentIdx> {
        let (idx, slot) = self.claim()?;
        slot.value.store(sum, Ordering::Relaxed);
        slot.initial.store(sum, Ordering::Relaxed);
        slot.total.store(sum, Ordering::Relaxed);
        slot.live.store(1, Ordering::Relaxed);
        slot.link.store(ancestor.0, Ordering::Relaxed);
        slot.discovering.store(true, Ordering::Relaxed);
        slot.kind.store(KIND_PARENT, Ordering::Release);
        Ok(ParentIdx(idx))
    }

    #[inline]
    pub fn best(&self, idx: ChildIdx) -> u32 {
        self.child(idx).value.load(Ordering::Acquire)
    }

    /// `best = min(best, candidate)`; returns the previous best.
    #[inline]
    pub fn atomic_min_best(&self, idx: ChildIdx, candidate: u32) -> u32 {
        self.child(idx).value.fetch_min(candidate, Ordering::AcqRel)
    }

    pub fn parent_of(&self, idx: ChildIdx) -> Option<ParentIdx> {
        match self.child(idx).link.load(Ordering::Relaxed) {
            NONE => None,
            p => Some(ParentIdx(p)),
        }
    }

    pub fn live_nodes(&self, idx: ChildIdx) -> i64 {
        self.child(idx).live.load(Ordering::Acquire)
    }

    pub fn inc_live_nodes(&self, idx: ChildIdx) -> i64 {
        let prev = self.child(idx).live.fetch_add(1, Ordering::AcqRel);
        debug_assert!(prev >= 1, "live-node increment on a finished scope");
        prev + 1
    }

    /// Returns the new count; zero hands completion of the scope to the caller.
    pub fn dec_live_nodes(&self, idx: ChildIdx) -> i64 {
        let now = self.child(idx).live.fetch_sub(1, Ordering::AcqRel) - 1;
        assert!(now >= 0, "live-node counter of entry {} dropped below zero", idx.0);
        now
    }

    /// Marks the child's best as a found cover. True only for the first caller.
    pub fn mark_achieved(&self, idx: ChildIdx) -> bool {
        !self.child(idx).achieved.swap(true, Ordering::AcqRel)
    }

    pub fn is_achieved(&self, idx: ChildIdx) -> bool {
        self.child(idx).achieved.load(Ordering::Acquire)
    }

    pub fn sum(&self, idx: ParentIdx) -> u32 {
        self.parent(idx).value.load(Ordering::Acquire)
    }

    pub fn ancestor_of(&self, idx: ParentIdx) -> ChildIdx {
        ChildIdx(self.parent(idx).link.load(Ordering::Relaxed))
    }

    /// Returns the new sum.
    pub fn add_to_sum(&self, idx: ParentIdx, delta: u32) -> u32 {
        self.parent(idx).value.fetch_add(delta, Ordering::AcqRel) + delta
    }

    /// Adds a component solved in place: counts towards sum, total and the folded tally.
    pub fn fold_component(&self, idx: ParentIdx, cover: u32) {
        let slot = self.parent(idx);
        slot.folded.fetch_add(cover, Ordering::Relaxed);
        slot.total.fetch_add(cover, Ordering::AcqRel);
        slot.value.fetch_add(cover, Ordering::AcqRel);
    }

    pub fn live_comps(&self, idx: ParentIdx) -> i64 {
        self.parent(idx).live.load(Ordering::Acquire)
    }

    pub fn inc_live_comps(&self, idx: ParentIdx) -> i64 {
        let prev = self.parent(idx).live.fetch_add(1, Ordering::AcqRel);
        debug_assert!(prev >= 1, "component added to a finished parent");
        prev + 1
    }

    /// Returns the new count; zero hands finalization of the parent to the caller.
    pub fn dec_live_comps(&self, idx: ParentIdx) -> i64 {
        let now = self.parent(idx).live.fetch_sub(1, Ordering::AcqRel) - 1;
        assert!(now >= 0, "live-component counter of entry {} dropped below zero", idx.0);
        now
    }

    /// Registers a dispatched component's starting best in the parent's total.
    pub fn add_total(&self, idx: ParentIdx, delta: u32, achieved: bool) {
        let slot = self.parent(idx);
        slot.total.fetch_add(delta, Ordering::AcqRel);
        if !achieved {
            slot.unachieved.fetch_add(1, Ordering::AcqRel);
        }
    }

    /// Permanently blocks the parent's total from being treated as a found cover.
    pub fn poison_total(&self, idx: ParentIdx) {
        self.parent(idx).unachieved.fetch_add(1, Ordering::AcqRel);
    }

    /// Lowers the total after a component improved by `delta`. Returns the new total.
    pub fn sub_total(&self, idx: ParentIdx, delta: u32) -> u32 {
        self.parent(idx).total.fetch_sub(delta, Ordering::AcqRel) - delta
    }

    pub fn dec_unachieved(&self, idx: ParentIdx) -> u32 {
        self.parent(idx).unachieved.fetch_sub(1, Ordering::AcqRel) - 1
    }

    pub fn finish_discovery(&self, idx: ParentIdx) {
        self.parent(idx).discovering.store(false, Ordering::Release);
    }

    /// The parent's total, if it currently equals the size of a cover actually found.
    pub fn achieved_total(&self, idx: ParentIdx) -> Option<u32> {
        let slot = self.parent(idx);
        if slot.discovering.load(Ordering::Acquire) || slot.unachieved.load(Ordering::Acquire) != 0 {
            return None;
        }
        Some(slot.total.load(Ordering::Acquire))
    }

    pub fn snapshot(&self, idx: usize) -> EntrySnapshot {
        let slot = self.slot(idx as u32);
        match slot.kind.load(Ordering::Acquire) {
            KIND_CHILD => EntrySnapshot::Child {
                best: slot.value.load(Ordering::Acquire),
                live_nodes: slot.live.load(Ordering::Acquire),
                parent: match slot.link.load(Ordering::Relaxed) {
                    NONE => None,
                    p => Some(ParentIdx(p)),
                },
                achieved: slot.achieved.load(Ordering::Acquire),
            },
            KIND_PARENT => EntrySnapshot::Parent {
                sum: slot.value.load(Ordering::Acquire),
                initial_sum: slot.initial.load(Ordering::Relaxed),
                folded: slot.folded.load(Ordering::Relaxed),
                live_comps: slot.live.load(Ordering::Acquire),
                ancestor: ChildIdx(slot.link.load(Ordering::Relaxed)),
            },
            k => panic!("registry entry {idx} has unknown kind {k}"),
        }
    }

    /// Checks quiescence and sum conservation over every entry.
    ///
    /// Only meaningful once all workers have stopped.
    pub fn audit(&self) -> RegistryAudit {
        let entries: Vec<EntrySnapshot> = (0..self.len()).map(|i| self.snapshot(i)).collect();
        let mut audit = RegistryAudit { entries: entries.len(), quiescent: true, conserved: true, ..Default::default() };
        let mut child_best_sum = vec![0u64; entries.len()];
        for (i, e) in entries.iter().enumerate() {
            match *e {
                EntrySnapshot::Child { best, live_nodes, parent, .. } => {
                    audit.child_entries += 1;
                    if live_nodes != 0 {
                        audit.quiescent = false;
                        audit.violations.push(format!("child {i} has {live_nodes} live nodes"));
                    }
                    if let Some(p) = parent {
                        child_best_sum[p.index()] += best as u64;
                    }
                }
                EntrySnapshot::Parent { live_comps, .. } => {
                    audit.parent_entries += 1;
                    if live_comps != 0 {
                        audit.quiescent = false;
                        audit.violations.push(format!("parent {i} has {live_comps} live components"));
                    }
                }
            }
        }
        // entries are appended after the entries they point to, so one forward pass suffices
        let mut level = vec![0usize; entries.len()];
        for (i, e) in entries.iter().enumerate() {
            if let EntrySnapshot::Parent { ancestor, .. } = *e {
                level[i] = match entries[ancestor.index()] {
                    EntrySnapshot::Child { parent: Some(q), .. } => level[q.index()] + 1,
                    _ => 1,
                };
                audit.max_nesting = audit.max_nesting.max(level[i]);
            }
        }
        for (i, e) in entries.iter().enumerate() {
            if let EntrySnapshot::Parent { sum, initial_sum, folded, live_comps: 0, .. } = *e {
                let expected = initial_sum as u64 + folded as u64 + child_best_sum[i];
                if sum as u64 != expected {
                    audit.conserved = false;
                    audit.violations.push(format!(
                        "parent {i}: sum {sum} but initial {initial_sum} + folded {folded} + children {}",
                        child_best_sum[i]
                    ));
                }
            }
        }
        audit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use std::thread;

    #[test]
    fn chunk_layout() {
        assert_eq!(locate(0), (0, 0));
        assert_eq!(locate(1023), (0, 1023));
        assert_eq!(locate(1024), (1, 0));
        assert_eq!(locate(3071), (1, 2047));
        assert_eq!(locate(3072), (2, 0));
        assert_eq!(locate(u32::MAX - 1).0, NUM_CHUNKS - 1);
    }

    #[test]
    fn child_entry_creation() {
        let reg = Registry::new(9, true, 64);
        let p = reg.new_parent(3, ChildIdx::ROOT).unwrap();
        // component of 6 vertices, scope best 7, sum 3
        let bound = (7u32 - 3).min(6 - 1);
        assert_eq!(bound, 4);
        let c = reg.new_child(bound, Some(p), false).unwrap();
        assert_eq!(
            reg.snapshot(c.index()),
            EntrySnapshot::Child { best: 4, live_nodes: 1, parent: Some(p), achieved: false }
        );
        assert_eq!(reg.parent_of(ChildIdx::ROOT), None);
        assert_eq!(reg.best(ChildIdx::ROOT), 9);
    }

    #[test]
    fn parent_entry_creation() {
        let reg = Registry::new(5, true, 64);
        let p = reg.new_parent(2, ChildIdx::ROOT).unwrap();
        assert_eq!(
            reg.snapshot(p.index()),
            EntrySnapshot::Parent { sum: 2, initial_sum: 2, folded: 0, live_comps: 1, ancestor: ChildIdx::ROOT }
        );
        let p0 = reg.new_parent(0, ChildIdx::ROOT).unwrap();
        assert_eq!(reg.sum(p0), 0);
        assert_eq!(reg.live_comps(p0), 1);
    }

    #[test]
    fn nested_ancestor_points_at_inner_scope() {
        let reg = Registry::new(10, true, 64);
        let outer = reg.new_parent(0, ChildIdx::ROOT).unwrap();
        let inner_scope = reg.new_child(4, Some(outer), true).unwrap();
        let inner = reg.new_parent(1, inner_scope).unwrap();
        assert_eq!(reg.ancestor_of(inner), inner_scope);
        assert_eq!(reg.parent_of(inner_scope), Some(outer));
    }

    #[test]
    fn min_best() {
        let reg = Registry::new(5, true, 8);
        assert_eq!(reg.atomic_min_best(ChildIdx::ROOT, 3), 5);
        assert_eq!(reg.best(ChildIdx::ROOT), 3);
        assert_eq!(reg.atomic_min_best(ChildIdx::ROOT, 7), 3);
        assert_eq!(reg.best(ChildIdx::ROOT), 3);
    }

    #[test]
    fn concurrent_min_is_order_free() {
        let reg = Arc::new(Registry::new(100, true, 8));
        let handles: Vec<_> = (0..8u32)
            .map(|t| {
                let reg = Arc::clone(&reg);
                thread::spawn(move || {
                    for x in (t * 10..t * 10 + 10).rev() {
                        reg.atomic_min_best(ChildIdx::ROOT, x + 2);
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert_eq!(reg.best(ChildIdx::ROOT), 2);
    }

    #[test]
    fn live_node_accounting() {
        let reg = Registry::new(5, true, 8);
        // one node branches into two children
        assert_eq!(reg.inc_live_nodes(ChildIdx::ROOT), 2);
        assert_eq!(reg.dec_live_nodes(ChildIdx::ROOT), 1);
        assert_eq!(reg.dec_live_nodes(ChildIdx::ROOT), 0);
    }

    #[test]
    #[should_panic(expected = "below zero")]
    fn live_node_underflow_is_a_protocol_violation() {
        let reg = Registry::new(5, true, 8);
        reg.dec_live_nodes(ChildIdx::ROOT);
        reg.dec_live_nodes(ChildIdx::ROOT);
    }

    #[test]
    fn sum_and_live_comps() {
        let reg = Registry::new(9, true, 8);
        let p = reg.new_parent(2, ChildIdx::ROOT).unwrap();
        assert_eq!(reg.add_to_sum(p, 3), 5);
        reg.inc_live_comps(p);
        assert_eq!(reg.dec_live_comps(p), 1);
        assert_eq!(reg.dec_live_comps(p), 0);
    }

    #[test]
    fn capacity_is_a_resource_error() {
        let reg = Registry::new(5, true, 2);
        reg.new_parent(0, ChildIdx::ROOT).unwrap();
        assert!(matches!(reg.new_parent(0, ChildIdx::ROOT), Err(Error::Resource(_))));
        assert_eq!(reg.len(), 2);
    }

    #[test]
    fn grows_across_chunks_concurrently() {
        const PER_THREAD: usize = 1500;
        let reg = Arc::new(Registry::new(5, true, 10 * PER_THREAD));
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let reg = Arc::clone(&reg);
                thread::spawn(move || {
                    (0..PER_THREAD).map(|i| reg.new_child(i as u32 + 1, None, true).unwrap()).collect::<Vec<_>>()
                })
            })
            .collect();
        let mut all: Vec<ChildIdx> = handles.into_iter().flat_map(|h| h.join().unwrap()).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 4 * PER_THREAD);
        assert_eq!(reg.len(), 4 * PER_THREAD + 1);
    }

    #[test]
    fn audit_detects_leftovers_and_checks_conservation() {
        let reg = Registry::new(10, true, 16);
        let p = reg.new_parent(2, ChildIdx::ROOT).unwrap();
        reg.fold_component(p, 2);
        let c = reg.new_child(3, Some(p), true).unwrap();
        reg.inc_live_comps(p);
        let audit = reg.audit();
        assert!(!audit.quiescent);

        reg.atomic_min_best(c, 2);
        assert_eq!(reg.dec_live_nodes(c), 0);
        reg.add_to_sum(p, reg.best(c));
        reg.dec_live_comps(p);
        assert_eq!(reg.dec_live_comps(p), 0);
        reg.atomic_min_best(ChildIdx::ROOT, reg.sum(p));
        assert_eq!(reg.dec_live_nodes(ChildIdx::ROOT), 0);

        let audit = reg.audit();
        assert!(audit.quiescent, "{:?}", audit.violations);
        assert!(audit.conserved, "{:?}", audit.violations);
        assert_eq!(audit.max_nesting, 1);
        assert_eq!(reg.best(ChildIdx::ROOT), 6);
    }
}
