//! Immutable compressed sparse row adjacency.

use crate::error::{Error, Result};

pub type Vertex = u32;

/// Undirected simple graph in CSR form.
///
/// Neighbors of `v` are `neighbors[offsets[v]..offsets[v + 1]]`, sorted ascending.
/// Every edge is stored twice, once per endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticGraph {
    offsets: Vec<usize>,
    neighbors: Vec<Vertex>,
}

impl StaticGraph {
    /// Builds the CSR arrays from a canonical edge list.
    ///
    /// Self-loops, duplicate edges and out-of-range endpoints are rejected.
    pub fn from_edges(num_vertices: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        if num_vertices > Vertex::MAX as usize {
            return Err(Error::Unsupported(format!(
                "{num_vertices} vertices exceed the 32-bit vertex id space"
            )));
        }
        let mut offsets = vec![0usize; num_vertices + 1];
        for &(u, v) in edges {
            for w in [u, v] {
                if w as usize >= num_vertices {
                    return Err(Error::VertexOutOfRange { vertex: w as u64, num_vertices });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {u}")));
            }
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }

        let mut cursor = offsets.clone();
        let mut neighbors = vec![0; 2 * edges.len()];
        for &(u, v) in edges {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for v in 0..num_vertices {
            let slice = &mut neighbors[offsets[v]..offsets[v + 1]];
            slice.sort_unstable();
            if let Some(w) = slice.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({v}, {})", w[0])));
            }
        }
        Ok(StaticGraph { offsets, neighbors })
    }

    pub fn empty(num_vertices: usize) -> Self {
        StaticGraph { offsets: vec![0; num_vertices + 1], neighbors: Vec::new() }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Adjacency test by binary search in the sorted neighbor slice.
    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn neighbor_array(&self) -> &[Vertex] {
        &self.neighbors
    }

    /// Each edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.num_vertices() as Vertex).flat_map(move |u| {
            self.neighbors(u).iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    /// Subgraph induced on `keep`, renumbered densely in increasing original order.
    ///
    /// Returns the new graph and the map from new index to original vertex id.
    pub fn induced_subgraph(&self, keep: &[Vertex]) -> Result<(StaticGraph, Vec<Vertex>)> {
        let n = self.num_vertices();
        let mut vertex_map: Vec<Vertex> = keep.to_vec();
        vertex_map.sort_unstable();
        vertex_map.dedup();
        if let Some(&bad) = vertex_map.iter().find(|&&v| v as usize >= n) {
            return Err(Error::VertexOutOfRange { vertex: bad as u64, num_vertices: n });
        }

        let mut renumber = vec![Vertex::MAX; n];
        for (i, &v) in vertex_map.iter().enumerate() {
            renumber[v as usize] = i as Vertex;
        }

        let mut offsets = Vec::with_capacity(vertex_map.len() + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for &v in &vertex_map {
            // original slices are sorted and renumbering is monotone, so the output stays sorted
            neighbors.extend(
                self.neighbors(v).iter().map(|&u| renumber[u as usize]).filter(|&u| u != Vertex::MAX),
            );
            offsets.push(neighbors.len());
        }
        Ok((StaticGraph { offsets, neighbors }, vertex_map))
    }

    /// True when `cover` touches every edge.
    pub fn is_vertex_cover(&self, cover: &[Vertex]) -> bool {
        let mut member = vec![false; self.num_vertices()];
        for &v in cover {
            match member.get_mut(v as usize) {
                Some(m) => *m = true,
                None => return false,
            }
        }
        self.edges().all(|(u, v)| member[u as usize] || member[v as usize])
    }
}
