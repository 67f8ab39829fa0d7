//! Undirected graph storage.
//!
//! Edges are kept canonically as `(u, v)` with `u < v`, sorted and
//! deduplicated, next to a CSR adjacency used for neighborhood queries.
//! Graphs are immutable once built.

mod io;
mod spectrum;

pub use io::{
    load_edge_list, read_snapshot, write_edge_list, write_snapshot, IdMap, IngestReport,
    LoadOptions, LoadedGraph,
};
pub use spectrum::{laplacian_spectrum, zero_multiplicity, SpectrumOptions, ZERO_TOLERANCE};

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Dense, zero-based vertex identifier.
pub type VertexId = u32;

/// Canonical undirected edge, smaller endpoint first.
pub type Edge = (VertexId, VertexId);

fn canonical(u: VertexId, v: VertexId) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A sorted list of distinct vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct VertexSet(Vec<VertexId>);

impl VertexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Wraps a vector that is already strictly increasing.
    ///
    /// Debug builds check the ordering.
    pub fn from_sorted(ids: Vec<VertexId>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Self(ids)
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<VertexId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.iter().copied()
    }

    /// Returns a copy with `v` inserted (no-op if already present).
    pub fn with(&self, v: VertexId) -> Self {
        let mut ids = self.0.clone();
        if let Err(pos) = ids.binary_search(&v) {
            ids.insert(pos, v);
        }
        Self(ids)
    }

    /// Size of the intersection, by a linear merge.
    pub fn intersection_len(&self, other: &Self) -> usize {
        sorted_intersection_len(&self.0, &other.0)
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        let mut ids: Vec<VertexId> = iter.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        Self(ids)
    }
}

pub(crate) fn sorted_intersection_len(a: &[VertexId], b: &[VertexId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// A canonical, sorted, duplicate-free set of undirected edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeSet(Vec<Edge>);

impl EdgeSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Edge] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, u: VertexId, v: VertexId) -> bool {
        self.0.binary_search(&canonical(u, v)).is_ok()
    }

    /// Set union of two edge sets.
    pub fn union(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self(out)
    }

    /// Largest endpoint plus one, or zero for an empty set.
    pub fn min_vertex_count(&self) -> usize {
        self.0
            .iter()
            .map(|&(_, v)| v as usize + 1)
            .max()
            .unwrap_or(0)
    }
}

impl FromIterator<Edge> for EdgeSet {
    /// Canonicalizes, drops self-loops and deduplicates.
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        let mut edges: Vec<Edge> = iter
            .into_iter()
            .filter(|&(u, v)| u != v)
            .map(|(u, v)| canonical(u, v))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Self(edges)
    }
}

/// Immutable undirected graph with optional positive edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    vertex_count: usize,
    edges: EdgeSet,
    /// Parallel to `edges`; `None` means every weight is 1.
    weights: Option<Vec<f64>>,
    offsets: Vec<usize>,
    adjacency: Vec<VertexId>,
}

impl Graph {
    /// Builds an unweighted graph. Self-loops are dropped and duplicates merged.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        Self::from_edge_set(vertex_count, edges.into_iter().collect())
    }

    pub fn from_edge_set(vertex_count: usize, edges: EdgeSet) -> Result<Self> {
        check_range(vertex_count, &edges)?;
        Ok(Self::assemble(vertex_count, edges, None))
    }

    /// Builds a weighted graph. Duplicate edges merge by summing weights.
    pub fn from_weighted(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, f64)>,
    ) -> Result<Self> {
        let mut raw: Vec<(Edge, f64)> = Vec::new();
        for (u, v, w) in edges {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::NonPositiveWeight {
                    u: u as usize,
                    v: v as usize,
                    weight: w,
                });
            }
            if u != v {
                raw.push((canonical(u, v), w));
            }
        }
        raw.sort_by_key(|a| a.0);
        let mut edges = Vec::with_capacity(raw.len());
        let mut weights: Vec<f64> = Vec::with_capacity(raw.len());
        for (e, w) in raw {
            if edges.last() == Some(&e) {
                *weights.last_mut().unwrap() += w;
            } else {
                edges.push(e);
                weights.push(w);
            }
        }
        let edges = EdgeSet(edges);
        check_range(vertex_count, &edges)?;
        Ok(Self::assemble(vertex_count, edges, Some(weights)))
    }

    fn assemble(vertex_count: usize, edges: EdgeSet, weights: Option<Vec<f64>>) -> Self {
        let mut degree = vec![0usize; vertex_count];
        for &(u, v) in edges.as_slice() {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..vertex_count].to_vec();
        let mut adjacency = vec![0; offsets[vertex_count]];
        // Edges are sorted, so each adjacency row comes out sorted too.
        for &(u, v) in edges.as_slice() {
            adjacency[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
        }
        for &(u, v) in edges.as_slice() {
            adjacency[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for v in 0..vertex_count {
            adjacency[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Self {
            vertex_count,
            edges,
            weights,
            offsets,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Weights parallel to [`Graph::edges`], if the graph is weighted.
    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Weight of edge `(u, v)`: `None` when absent, 1 for unweighted graphs.
    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<f64> {
        let idx = self.edges.0.binary_search(&canonical(u, v)).ok()?;
        Some(self.weights.as_ref().map_or(1.0, |w| w[idx]))
    }

    /// Open neighborhood of `v`, as a set.
    pub fn neighbors(&self, v: VertexId) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(VertexSet::from_sorted(self.adj(v).to_vec()))
    }

    /// Sorted neighbor slice of `v`. Panics if `v` is out of range.
    pub fn adj(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.vertex_count {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v as usize,
                vertex_count: self.vertex_count,
            })
        }
    }

    /// Component label per vertex, labels dense from 0 in order of first vertex.
    pub fn component_labels(&self) -> Vec<u32> {
        let n = self.vertex_count;
        let mut label = vec![u32::MAX; n];
        let mut next = 0u32;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != u32::MAX {
                continue;
            }
            label[start] = next;
            queue.push_back(start as VertexId);
            while let Some(u) = queue.pop_front() {
                for &w in self.adj(u) {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Number of connected components; isolated vertices count as components.
    pub fn count_components(&self) -> usize {
        self.component_labels()
            .iter()
            .max()
            .map_or(0, |&m| m as usize + 1)
    }

    /// Size of the largest connected component.
    pub fn largest_component_size(&self) -> usize {
        let labels = self.component_labels();
        let mut sizes = vec![0usize; self.count_components()];
        for l in labels {
            sizes[l as usize] += 1;
        }
        sizes.into_iter().max().unwrap_or(0)
    }

    /// Vertices within `hops` steps of `v`, excluding `v`.
    pub fn within_hops(&self, v: VertexId, hops: usize) -> VertexSet {
        let mut seen = std::collections::HashSet::from([v]);
        let mut frontier = vec![v];
        for _ in 0..hops {
            let mut next = Vec::new();
            for &u in &frontier {
                next.extend(self.adj(u).iter().copied().filter(|w| seen.insert(*w)));
            }
            frontier = next;
        }
        seen.into_iter().filter(|&u| u != v).collect()
    }
}

fn check_range(vertex_count: usize, edges: &EdgeSet) -> Result<()> {
    match edges.as_slice().iter().map(|&(_, v)| v as usize).max() {
        Some(max) if max >= vertex_count => Err(Error::VertexOutOfRange {
            vertex: max,
            vertex_count,
        }),
        _ => Ok(()),
    }
}
