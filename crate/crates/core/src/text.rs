//! Term vectors, TF-IDF weighting and top-k content neighbor search.
//!
//! Weights follow `sqrt(tf) * ln(1 + |T| / total_tf(c))` where `total_tf(c)`
//! is the raw count of term `c` summed over the whole corpus. Top-k search
//! runs over an inverted index with term-at-a-time accumulation and is exact
//! for the (optionally truncated) weighted vectors.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Graph, VertexId};
use crate::similarity::{cosine, SparseVector};

/// TF-IDF weighted term vector.
pub type WeightedVector = SparseVector;

pub type TermId = u32;

/// Raw per-vertex term counts plus corpus statistics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TermVectorStore {
    vectors: Vec<Vec<(TermId, u32)>>,
    doc_freq: HashMap<TermId, u32>,
    total_tf: HashMap<TermId, u64>,
}

impl TermVectorStore {
    /// One entry list per vertex. Repeated terms are summed, zero counts dropped.
    pub fn new(vectors: Vec<Vec<(TermId, u32)>>) -> Self {
        let vectors: Vec<Vec<(TermId, u32)>> = vectors
            .into_iter()
            .map(|mut v| {
                v.sort_by_key(|&(t, _)| t);
                let mut merged: Vec<(TermId, u32)> = Vec::with_capacity(v.len());
                for (t, c) in v {
                    match merged.last_mut() {
                        Some(last) if last.0 == t => last.1 += c,
                        _ => merged.push((t, c)),
                    }
                }
                merged.retain(|&(_, c)| c > 0);
                merged
            })
            .collect();
        let mut doc_freq = HashMap::new();
        let mut total_tf = HashMap::new();
        for v in &vectors {
            for &(t, c) in v {
                *doc_freq.entry(t).or_insert(0) += 1;
                *total_tf.entry(t).or_insert(0) += c as u64;
            }
        }
        Self {
            vectors,
            doc_freq,
            total_tf,
        }
    }

    /// A store of `n` empty vectors.
    pub fn empty(n: usize) -> Self {
        Self::new(vec![Vec::new(); n])
    }

    pub fn corpus_size(&self) -> usize {
        self.vectors.len()
    }

    pub fn counts(&self, vertex: VertexId) -> &[(TermId, u32)] {
        &self.vectors[vertex as usize]
    }

    /// Number of vectors containing `term`.
    pub fn doc_freq(&self, term: TermId) -> u32 {
        self.doc_freq.get(&term).copied().unwrap_or(0)
    }

    /// Corpus-wide raw count of `term`.
    pub fn total_tf(&self, term: TermId) -> u64 {
        self.total_tf.get(&term).copied().unwrap_or(0)
    }

    /// Sorted term ids present in the vector of `vertex`.
    pub fn term_set(&self, vertex: VertexId) -> Vec<TermId> {
        self.vectors[vertex as usize]
            .iter()
            .map(|&(t, _)| t)
            .collect()
    }

    /// TF-IDF weights of one vertex.
    pub fn tfidf_weight(&self, vertex: VertexId) -> WeightedVector {
        let n = self.corpus_size() as f64;
        SparseVector::from_sorted(
            self.vectors[vertex as usize]
                .iter()
                .map(|&(t, c)| {
                    let idf = (1.0 + n / self.total_tf(t) as f64).ln();
                    (t, (c as f64).sqrt() * idf)
                })
                .collect(),
        )
    }

    /// TF-IDF vectors for every vertex, truncated to `m` entries when given.
    pub fn weighted_vectors(&self, m: Option<usize>) -> Vec<WeightedVector> {
        (0..self.corpus_size() as VertexId)
            .map(|v| {
                let w = self.tfidf_weight(v);
                match m {
                    Some(m) => truncate_top_m(&w, m),
                    None => w,
                }
            })
            .collect()
    }
}

/// Keeps the `m` largest weights (ties to the smaller term id).
pub fn truncate_top_m(v: &WeightedVector, m: usize) -> WeightedVector {
    if v.len() <= m {
        return v.clone();
    }
    let mut entries = v.entries().to_vec();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    entries.truncate(m);
    entries.sort_by_key(|&(t, _)| t);
    SparseVector::from_sorted(entries)
}

/// Where content neighbors may be drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    Full,
    OneHop,
    TwoHop,
}

impl Scope {
    fn hops(self) -> Option<usize> {
        match self {
            Scope::Full => None,
            Scope::OneHop => Some(1),
            Scope::TwoHop => Some(2),
        }
    }
}

/// Inverted index over weighted vectors.
#[derive(Debug, Clone)]
pub struct ContentIndex {
    vectors: Vec<WeightedVector>,
    postings: HashMap<TermId, Vec<(VertexId, f64)>>,
}

impl ContentIndex {
    pub fn build(store: &TermVectorStore, m: Option<usize>) -> Self {
        Self::from_vectors(store.weighted_vectors(m))
    }

    pub fn from_vectors(vectors: Vec<WeightedVector>) -> Self {
        let mut postings: HashMap<TermId, Vec<(VertexId, f64)>> = HashMap::new();
        for (v, vec) in vectors.iter().enumerate() {
            for &(t, w) in vec.entries() {
                postings.entry(t).or_default().push((v as VertexId, w));
            }
        }
        Self { vectors, postings }
    }

    pub fn vectors(&self) -> &[WeightedVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Up to `k` most cosine-similar vertices to `vertex`, best first.
    ///
    /// Zero-similarity vertices are never returned. Ties go to the smaller id.
    pub fn topk(
        &self,
        vertex: VertexId,
        k: usize,
        scope: Scope,
        base_graph: Option<&Graph>,
    ) -> Result<Vec<(VertexId, f64)>> {
        let query = &self.vectors[vertex as usize];
        if query.norm() == 0.0 || k == 0 {
            return Ok(Vec::new());
        }
        let mut scored: Vec<(VertexId, f64)> = match scope.hops() {
            None => {
                // Term-at-a-time accumulation, query terms ascending.
                let mut acc: HashMap<VertexId, f64> = HashMap::new();
                for &(t, qw) in query.entries() {
                    for &(j, w) in &self.postings[&t] {
                        if j != vertex {
                            *acc.entry(j).or_insert(0.0) += qw * w;
                        }
                    }
                }
                acc.into_iter()
                    .map(|(j, dot)| (j, dot / (query.norm() * self.vectors[j as usize].norm())))
                    .collect()
            }
            Some(hops) => {
                let graph = base_graph.ok_or_else(|| {
                    Error::Config("hop-restricted content search needs the topology graph".into())
                })?;
                graph
                    .within_hops(vertex, hops)
                    .iter()
                    .map(|j| (j, cosine(query, &self.vectors[j as usize])))
                    .collect()
            }
        };
        scored.retain(|&(_, s)| s > 0.0);
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored)
    }

    /// Union of every vertex's top-k links, as undirected edges.
    pub fn content_edges(
        &self,
        k: usize,
        scope: Scope,
        base_graph: Option<&Graph>,
    ) -> Result<EdgeSet> {
        let per_vertex = |v: usize| -> Result<Vec<(VertexId, VertexId)>> {
            Ok(self
                .topk(v as VertexId, k, scope, base_graph)?
                .into_iter()
                .map(|(j, _)| (v as VertexId, j))
                .collect())
        };
        #[cfg(feature = "parallel")]
        let lists: Vec<Vec<(VertexId, VertexId)>> = {
            use rayon::prelude::*;
            (0..self.len())
                .into_par_iter()
                .map(per_vertex)
                .collect::<Result<_>>()?
        };
        #[cfg(not(feature = "parallel"))]
        let lists: Vec<Vec<(VertexId, VertexId)>> =
            (0..self.len()).map(per_vertex).collect::<Result<_>>()?;
        Ok(lists.into_iter().flatten().collect())
    }
}

/// One-off top-k query; builds a fresh index. Prefer [`ContentIndex`] for
/// repeated queries.
pub fn topk_content_neighbors(
    store: &TermVectorStore,
    vertex: VertexId,
    k: usize,
    scope: Scope,
    base_graph: Option<&Graph>,
    m: Option<usize>,
) -> Result<Vec<VertexId>> {
    let index = ContentIndex::build(store, m);
    Ok(index
        .topk(vertex, k, scope, base_graph)?
        .into_iter()
        .map(|(j, _)| j)
        .collect())
}

/// Content edge set for the whole corpus.
pub fn build_content_edges(
    store: &TermVectorStore,
    k: usize,
    scope: Scope,
    base_graph: Option<&Graph>,
    m: Option<usize>,
) -> Result<EdgeSet> {
    ContentIndex::build(store, m).content_edges(k, scope, base_graph)
}

/// Reads `vertex_id term:count term:count ...` lines.
///
/// Vertices without a line get an empty vector. When `vertex_count` is
/// given every id must be below it; otherwise the count is the largest id
/// plus one.
pub fn load_term_vectors<R: BufRead>(
    reader: R,
    vertex_count: Option<usize>,
) -> Result<TermVectorStore> {
    let mut rows: Vec<(usize, Vec<(TermId, u32)>)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let vertex: usize = toks.next().unwrap().parse().map_err(|_| Error::Parse {
            line: lineno,
            message: "expected a vertex id".into(),
        })?;
        let mut entries = Vec::new();
        for tok in toks {
            let parsed = tok
                .split_once(':')
                .and_then(|(t, c)| Some((t.parse::<TermId>().ok()?, c.parse::<u32>().ok()?)));
            match parsed {
                Some(e) => entries.push(e),
                None => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("expected `term:count`, found `{tok}`"),
                    })
                }
            }
        }
        rows.push((vertex, entries));
    }
    let seen = rows.iter().map(|(v, _)| v + 1).max().unwrap_or(0);
    let n = vertex_count.unwrap_or(seen);
    if seen > n {
        return Err(Error::VertexOutOfRange {
            vertex: seen - 1,
            vertex_count: n,
        });
    }
    let mut vectors = vec![Vec::new(); n];
    let mut filled = vec![false; n];
    for (v, entries) in rows {
        if std::mem::replace(&mut filled[v], true) {
            return Err(Error::Parse {
                line: 0,
                message: format!("vertex {v} has more than one term-vector line"),
            });
        }
        vectors[v] = entries;
    }
    Ok(TermVectorStore::new(vectors))
}

pub fn write_term_vectors<W: Write>(store: &TermVectorStore, mut out: W) -> Result<()> {
    for v in 0..store.corpus_size() {
        write!(out, "{v}")?;
        for (t, c) in store.counts(v as VertexId) {
            write!(out, " {t}:{c}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads the vocabulary sidecar: `term_id term` per line.
pub fn load_vocabulary<R: BufRead>(reader: R) -> Result<HashMap<TermId, String>> {
    let mut vocab = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let (id, term) = body
            .split_once(char::is_whitespace)
            .and_then(|(i, t)| Some((i.parse::<TermId>().ok()?, t.trim().to_string())))
            .ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: "expected `term_id term`".into(),
            })?;
        vocab.insert(id, term);
    }
    Ok(vocab)
}
