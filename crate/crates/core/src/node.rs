//! Per-node residual state: the degree array and its maintenance primitives.
//!
//! A search node never owns a copy of the graph. Its residual graph is encoded
//! entirely by a degree array over the vertices of the shared [`StaticGraph`]:
//! an edge is still uncovered iff both endpoints have non-zero degree. Removing a
//! vertex zeroes its entry and decrements every live neighbor.
//!
//! Each node is processed by exactly one worker, so entries are updated with plain
//! writes. Narrow entry types (`u8`, `u16`) need no sub-word atomics under that contract.

use std::fmt::Debug;
use std::ops::RangeInclusive;

use fixedbitset::FixedBitSet;

use crate::graph::{StaticGraph, Vertex};
use crate::registry::ChildIdx;

/// Integer type backing one degree entry.
///
/// The all-ones value is reserved as a poison marker and never holds a live degree.
pub trait DegreeInt: Copy + Ord + Default + Debug + Send + Sync + 'static {
    const WIDTH: DegreeWidth;
    const ZERO: Self;
    const ONE: Self;
    const POISON: Self;

    fn from_usize(d: usize) -> Self;
    fn to_usize(self) -> usize;
}

macro_rules! degree_int {
    ($t:ty, $w:expr) => {
        impl DegreeInt for $t {
            const WIDTH: DegreeWidth = $w;
            const ZERO: Self = 0;
            const ONE: Self = 1;
            const POISON: Self = <$t>::MAX;

            #[inline]
            fn from_usize(d: usize) -> Self {
                debug_assert!(d < <$t>::MAX as usize, "degree {d} does not fit");
                d as $t
            }

            #[inline]
            fn to_usize(self) -> usize {
                self as usize
            }
        }
    };
}

degree_int!(u8, DegreeWidth::W8);
degree_int!(u16, DegreeWidth::W16);
degree_int!(u32, DegreeWidth::W32);

/// Bits per degree-array entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DegreeWidth {
    W8,
    W16,
    W32,
}

impl DegreeWidth {
    pub const ALL: [DegreeWidth; 3] = [DegreeWidth::W8, DegreeWidth::W16, DegreeWidth::W32];

    pub fn bits(self) -> u32 {
        match self {
            DegreeWidth::W8 => 8,
            DegreeWidth::W16 => 16,
            DegreeWidth::W32 => 32,
        }
    }

    pub fn from_bits(bits: u32) -> Option<Self> {
        match bits {
            8 => Some(DegreeWidth::W8),
            16 => Some(DegreeWidth::W16),
            32 => Some(DegreeWidth::W32),
            _ => None,
        }
    }

    /// `max_degree < 2^bits - 1`; the all-ones value stays free as poison.
    pub fn fits(self, max_degree: usize) -> bool {
        (max_degree as u64) < (1u64 << self.bits()) - 1
    }
}

/// One search-tree node.
#[derive(Debug, Clone)]
pub struct SearchNode<D> {
    degrees: Vec<D>,
    solution_size: u32,
    edges_remaining: usize,
    lo: usize,
    hi: usize,
    track_bounds: bool,
    scope: ChildIdx,
    depth: u32,
    inclusion: Option<FixedBitSet>,
}

impl<D: DegreeInt> SearchNode<D> {
    /// Root node of `graph`: every vertex live with its full degree.
    pub fn root(graph: &StaticGraph, scope: ChildIdx) -> Self {
        let n = graph.num_vertices();
        debug_assert!(D::WIDTH.fits(graph.max_degree()));
        let degrees: Vec<D> = (0..n as Vertex).map(|v| D::from_usize(graph.degree(v))).collect();
        let mut node = SearchNode {
            degrees,
            solution_size: 0,
            edges_remaining: graph.num_edges(),
            lo: 0,
            hi: n.saturating_sub(1),
            track_bounds: true,
            scope,
            depth: 0,
            inclusion: None,
        };
        node.recompute_bounds();
        node
    }

    /// Node whose residual graph is the given vertex set of `parent`, with an empty
    /// partial cover. `vertices` must be a union of components of the parent's residual graph.
    pub fn component(parent: &SearchNode<D>, vertices: &[Vertex], scope: ChildIdx) -> Self {
        let n = parent.degrees.len();
        let mut degrees = vec![D::ZERO; n];
        let mut total = 0usize;
        let (mut lo, mut hi) = (n, 0);
        for &v in vertices {
            let d = parent.degrees[v as usize];
            degrees[v as usize] = d;
            total += d.to_usize();
            lo = lo.min(v as usize);
            hi = hi.max(v as usize);
        }
        let mut node = SearchNode {
            degrees,
            solution_size: 0,
            edges_remaining: total / 2,
            lo,
            hi,
            track_bounds: parent.track_bounds,
            scope,
            depth: parent.depth + 1,
            inclusion: parent.inclusion.as_ref().map(|s| FixedBitSet::with_capacity(s.len())),
        };
        if !node.track_bounds {
            node.reset_full_range();
        }
        node
    }

    /// Enables the cover-membership record. Vertices removed into the cover from now on are tracked.
    pub fn with_inclusion(mut self) -> Self {
        self.inclusion = Some(FixedBitSet::with_capacity(self.degrees.len()));
        self
    }

    /// Switches bound tracking; when off, every scan covers the whole array.
    pub fn with_bounds(mut self, track: bool) -> Self {
        self.track_bounds = track;
        if track {
            self.lo = 0;
            self.hi = self.degrees.len().saturating_sub(1);
            self.recompute_bounds();
        } else {
            self.reset_full_range();
        }
        self
    }

    fn reset_full_range(&mut self) {
        self.lo = 0;
        self.hi = self.degrees.len().saturating_sub(1);
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.degrees[v as usize].to_usize()
    }

    #[inline]
    pub fn is_live(&self, v: Vertex) -> bool {
        self.degrees[v as usize] != D::ZERO
    }

    pub fn degrees(&self) -> &[D] {
        &self.degrees
    }

    pub fn num_vertices(&self) -> usize {
        self.degrees.len()
    }

    #[inline]
    pub fn solution_size(&self) -> u32 {
        self.solution_size
    }

    #[inline]
    pub fn edges_remaining(&self) -> usize {
        self.edges_remaining
    }

    pub fn scope(&self) -> ChildIdx {
        self.scope
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn set_depth(&mut self, depth: u32) {
        self.depth = depth;
    }

    pub fn inclusion(&self) -> Option<&FixedBitSet> {
        self.inclusion.as_ref()
    }

    /// `(lo, hi)`; the empty range is encoded as `lo = num_vertices, hi = 0`.
    pub fn bounds(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    /// Vertices that may have non-zero degree.
    #[inline]
    pub fn range(&self) -> RangeInclusive<usize> {
        if self.degrees.is_empty() {
            #[allow(clippy::reversed_empty_ranges)]
            return 1..=0;
        }
        self.lo..=self.hi
    }

    /// Live vertices in increasing order.
    pub fn live_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.range().filter(move |&v| self.degrees[v] != D::ZERO).map(|v| v as Vertex)
    }

    /// First live neighbor of `v`, if any.
    #[inline]
    pub fn live_neighbor(&self, graph: &StaticGraph, v: Vertex) -> Option<Vertex> {
        graph.neighbors(v).iter().copied().find(|&u| self.is_live(u))
    }

    /// Removes `v` and its incident uncovered edges, optionally adding it to the cover.
    ///
    /// Returns the degree `v` had. Removing an already isolated vertex only does the
    /// cover bookkeeping.
    pub fn remove_vertex(&mut self, graph: &StaticGraph, v: Vertex, into_cover: bool) -> usize {
        let old = self.degrees[v as usize];
        debug_assert_ne!(old, D::POISON, "poisoned degree entry at {v}");
        if old != D::ZERO {
            let mut left = old.to_usize();
            for &u in graph.neighbors(v) {
                let d = &mut self.degrees[u as usize];
                if *d != D::ZERO {
                    *d = D::from_usize(d.to_usize() - 1);
                    left -= 1;
                    if left == 0 {
                        break;
                    }
                }
            }
            debug_assert_eq!(left, 0, "degree of {v} disagrees with its live neighbors");
            self.degrees[v as usize] = D::ZERO;
            self.edges_remaining -= old.to_usize();
        }
        if into_cover {
            self.solution_size += 1;
            if let Some(set) = self.inclusion.as_mut() {
                debug_assert!(!set.contains(v as usize), "{v} added to the cover twice");
                set.insert(v as usize);
            }
        }
        old.to_usize()
    }

    /// Tightens `[lo, hi]` to the first and last non-zero entry.
    ///
    /// Degrees never increase, so only the previous range is scanned.
    pub fn recompute_bounds(&mut self) {
        if !self.track_bounds {
            if self.edges_remaining == 0 {
                self.lo = self.degrees.len();
                self.hi = 0;
            }
            return;
        }
        let n = self.degrees.len();
        if self.lo > self.hi || n == 0 {
            self.lo = n;
            self.hi = 0;
            return;
        }
        let (lo, hi) = (self.lo, self.hi.min(n - 1));
        match (lo..=hi).find(|&v| self.degrees[v] != D::ZERO) {
            None => {
                self.lo = n;
                self.hi = 0;
            }
            Some(first) => {
                let last = (first..=hi).rev().find(|&v| self.degrees[v] != D::ZERO).unwrap();
                self.lo = first;
                self.hi = last;
            }
        }
    }

    /// Checks the degree, edge-count and bound invariants against a from-scratch recount.
    pub fn check_invariants(&self, graph: &StaticGraph) -> Result<(), String> {
        let mut sum = 0usize;
        for v in 0..self.degrees.len() {
            let d = self.degrees[v].to_usize();
            sum += d;
            if d > 0 {
                if !(self.lo <= v && v <= self.hi) {
                    return Err(format!("live vertex {v} outside bounds {:?}", self.bounds()));
                }
                let live = graph.neighbors(v as Vertex).iter().filter(|&&u| self.is_live(u)).count();
                if live != d {
                    return Err(format!("vertex {v}: stored degree {d}, recount {live}"));
                }
            }
        }
        if sum != 2 * self.edges_remaining {
            return Err(format!("edge count {} but degree sum {sum}", self.edges_remaining));
        }
        Ok(())
    }
}
