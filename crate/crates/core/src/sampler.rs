//! Biased local edge sampling.
//!
//! For every vertex `v` with neighbors `Γ(v)` in the edge union, each
//! neighbor gets a structural score (similarity of the two topological
//! neighbor sets) and a content score (similarity of the two term vectors).
//! Each score vector is normalized over `Γ(v)`, the two are blended with
//! weight `alpha`, and `v` keeps its `ceil(sqrt(|Γ(v)|))` best neighbors.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cluster::{Clusterer, Clustering};
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Graph, VertexId};
use crate::seed::derive;
use crate::similarity::{
    cosine, estimate_cosine, estimate_jaccard, jaccard, set_cosine, simhash_signature,
    MinHashSignature, MinHasher, Normalizer, SimHashSignature, SparseVector,
};
use crate::text::{ContentIndex, Scope, TermVectorStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimilarityKind {
    CosineExact,
    CosineSimhash,
    JaccardExact,
    JaccardMinhash,
}

impl SimilarityKind {
    pub fn is_exact(self) -> bool {
        matches!(self, Self::CosineExact | Self::JaccardExact)
    }
}

/// Whether a vertex belongs to its own structural neighbor set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Neighborhood {
    Open,
    Closed,
}

/// How per-vertex selections merge into the sampled edge set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Retention {
    /// Keep an edge selected by either endpoint.
    Either,
    /// Keep an edge only when both endpoints select it.
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Content neighbors per vertex.
    pub k: usize,
    /// Weight of the structural channel.
    pub alpha: f64,
    pub similarity: SimilarityKind,
    pub normalizer: Normalizer,
    pub scope: Scope,
    /// Keep only the `m` heaviest TF-IDF entries per vector.
    pub m: Option<usize>,
    /// MinHash functions.
    pub hashes: usize,
    /// SimHash bits.
    pub bits: usize,
    pub seed: u64,
    pub structural_neighborhood: Neighborhood,
    pub retention: Retention,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            k: 50,
            alpha: 0.5,
            similarity: SimilarityKind::CosineExact,
            normalizer: Normalizer::ZeroOne,
            scope: Scope::Full,
            m: None,
            hashes: 30,
            bits: 512,
            seed: 0,
            structural_neighborhood: Neighborhood::Closed,
            retention: Retention::Either,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.hashes == 0 || self.bits == 0 {
            return Err(Error::Config(
                "hash and bit counts must be at least 1".into(),
            ));
        }
        if self.m == Some(0) {
            return Err(Error::Config("m must be at least 1".into()));
        }
        Ok(())
    }
}

/// Edges kept around a vertex of the given union degree: `ceil(sqrt(degree))`.
pub fn retention_count(degree: usize) -> Result<usize> {
    if degree == 0 {
        return Err(Error::Config(
            "retention count of an isolated vertex".into(),
        ));
    }
    // Integer ceil-sqrt avoids float rounding at perfect squares.
    let mut r = (degree as f64).sqrt() as usize;
    while r * r < degree {
        r += 1;
    }
    while r > 1 && (r - 1) * (r - 1) >= degree {
        r -= 1;
    }
    Ok(r)
}

/// Per-neighbor scores around one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredNeighborhood {
    pub owner: VertexId,
    pub neighbors: Vec<VertexId>,
    pub structural: Vec<f64>,
    pub content: Vec<f64>,
    pub structural_norm: Vec<f64>,
    pub content_norm: Vec<f64>,
    /// `alpha * structural_norm + (1 - alpha) * content_norm`.
    pub blended: Vec<f64>,
}

pub fn build_edge_union(topo: &EdgeSet, content: &EdgeSet) -> EdgeSet {
    topo.union(content)
}

enum Signatures {
    None,
    MinHash {
        structural: Vec<Option<MinHashSignature>>,
        content: Vec<Option<MinHashSignature>>,
    },
    SimHash {
        structural: Vec<Option<SimHashSignature>>,
        content: Vec<Option<SimHashSignature>>,
    },
}

/// Precomputed per-vertex inputs for the similarity channels.
pub struct SimilarityContext {
    kind: SimilarityKind,
    structural_sets: Vec<Vec<VertexId>>,
    term_vectors: Vec<SparseVector>,
    term_sets: Vec<Vec<u32>>,
    signatures: Signatures,
}

impl SimilarityContext {
    pub fn new(g_topo: &Graph, store: &TermVectorStore, cfg: &SamplerConfig) -> Result<Self> {
        if store.corpus_size() != g_topo.vertex_count() {
            return Err(Error::Config(format!(
                "{} term vectors for {} vertices",
                store.corpus_size(),
                g_topo.vertex_count()
            )));
        }
        let n = g_topo.vertex_count();
        let structural_sets: Vec<Vec<VertexId>> = (0..n as VertexId)
            .map(|v| match cfg.structural_neighborhood {
                Neighborhood::Open => g_topo.adj(v).to_vec(),
                Neighborhood::Closed => {
                    let mut s = g_topo.adj(v).to_vec();
                    let pos = s.partition_point(|&u| u < v);
                    s.insert(pos, v);
                    s
                }
            })
            .collect();
        let term_vectors = store.weighted_vectors(cfg.m);
        let term_sets: Vec<Vec<u32>> = term_vectors.iter().map(SparseVector::support).collect();
        let signatures = match cfg.similarity {
            SimilarityKind::CosineExact | SimilarityKind::JaccardExact => Signatures::None,
            SimilarityKind::JaccardMinhash => {
                let s_hasher = MinHasher::new(cfg.hashes, derive(cfg.seed, "minhash-structural"))?;
                let c_hasher = MinHasher::new(cfg.hashes, derive(cfg.seed, "minhash-content"))?;
                Signatures::MinHash {
                    structural: structural_sets
                        .iter()
                        .map(|s| s_hasher.signature(s).ok())
                        .collect(),
                    content: term_sets
                        .iter()
                        .map(|s| c_hasher.signature(s).ok())
                        .collect(),
                }
            }
            SimilarityKind::CosineSimhash => {
                let (s_seed, c_seed) = (
                    derive(cfg.seed, "simhash-structural"),
                    derive(cfg.seed, "simhash-content"),
                );
                Signatures::SimHash {
                    structural: structural_sets
                        .iter()
                        .map(|s| {
                            let x = SparseVector::new(s.iter().map(|&u| (u, 1.0)));
                            simhash_signature(&x, cfg.bits, s_seed).ok()
                        })
                        .collect(),
                    content: term_vectors
                        .iter()
                        .map(|x| simhash_signature(x, cfg.bits, c_seed).ok())
                        .collect(),
                }
            }
        };
        Ok(Self {
            kind: cfg.similarity,
            structural_sets,
            term_vectors,
            term_sets,
            signatures,
        })
    }

    /// Similarity of the topological neighbor sets of `u` and `v`.
    pub fn structural(&self, u: VertexId, v: VertexId) -> f64 {
        let (a, b) = (
            &self.structural_sets[u as usize],
            &self.structural_sets[v as usize],
        );
        match (&self.signatures, self.kind) {
            (Signatures::MinHash { structural, .. }, _) => estimate_pair(
                &structural[u as usize],
                &structural[v as usize],
                estimate_jaccard,
            ),
            (Signatures::SimHash { structural, .. }, _) => estimate_pair(
                &structural[u as usize],
                &structural[v as usize],
                estimate_cosine,
            ),
            (_, SimilarityKind::JaccardExact) => jaccard(a, b),
            _ => set_cosine(a, b),
        }
    }

    /// Similarity of the term vectors of `u` and `v`.
    pub fn content(&self, u: VertexId, v: VertexId) -> f64 {
        let (u, v) = (u as usize, v as usize);
        match (&self.signatures, self.kind) {
            (Signatures::MinHash { content, .. }, _) => {
                estimate_pair(&content[u], &content[v], estimate_jaccard)
            }
            (Signatures::SimHash { content, .. }, _) => {
                estimate_pair(&content[u], &content[v], estimate_cosine)
            }
            (_, SimilarityKind::JaccardExact) => jaccard(&self.term_sets[u], &self.term_sets[v]),
            _ => cosine(&self.term_vectors[u], &self.term_vectors[v]),
        }
    }
}

fn estimate_pair<S>(a: &Option<S>, b: &Option<S>, f: impl Fn(&S, &S) -> Result<f64>) -> f64 {
    match (a, b) {
        // Signatures share one hasher, so the estimate cannot fail.
        (Some(a), Some(b)) => f(a, b).unwrap_or(0.0),
        _ => 0.0,
    }
}

/// Scores every neighbor in `gamma` from the point of view of `v`.
pub fn score_neighborhood(
    ctx: &SimilarityContext,
    cfg: &SamplerConfig,
    v: VertexId,
    gamma: &[VertexId],
) -> ScoredNeighborhood {
    let structural: Vec<f64> = gamma.iter().map(|&j| ctx.structural(v, j)).collect();
    let content: Vec<f64> = gamma.iter().map(|&j| ctx.content(v, j)).collect();
    let structural_norm = cfg.normalizer.apply(&structural);
    let content_norm = cfg.normalizer.apply(&content);
    let blended = structural_norm
        .iter()
        .zip(&content_norm)
        .map(|(t, c)| cfg.alpha * t + (1.0 - cfg.alpha) * c)
        .collect();
    ScoredNeighborhood {
        owner: v,
        neighbors: gamma.to_vec(),
        structural,
        content,
        structural_norm,
        content_norm,
        blended,
    }
}

/// Indices of the `retain` best scores, best first, ties to the smaller id.
fn select_top(neighbors: &[VertexId], scores: &[f64], retain: usize) -> Vec<VertexId> {
    let mut order: Vec<usize> = (0..neighbors.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then(neighbors[a].cmp(&neighbors[b]))
    });
    order.truncate(retain);
    order.into_iter().map(|i| neighbors[i]).collect()
}

/// Everything needed to run the per-vertex selection loop.
pub struct Sampler<'a> {
    g_topo: &'a Graph,
    union: Graph,
    ctx: SimilarityContext,
    cfg: SamplerConfig,
    weighted: bool,
}

impl<'a> Sampler<'a> {
    pub fn new(
        g_topo: &'a Graph,
        content_edges: &EdgeSet,
        store: &TermVectorStore,
        cfg: &SamplerConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if content_edges.min_vertex_count() > g_topo.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: content_edges.min_vertex_count() - 1,
                vertex_count: g_topo.vertex_count(),
            });
        }
        let union = Graph::from_edge_set(
            g_topo.vertex_count(),
            build_edge_union(g_topo.edges(), content_edges),
        )?;
        Ok(Self {
            g_topo,
            union,
            ctx: SimilarityContext::new(g_topo, store, cfg)?,
            cfg: cfg.clone(),
            weighted: false,
        })
    }

    /// Multiply blended scores by the topological edge weight before ranking.
    pub fn weighted(mut self) -> Self {
        self.weighted = true;
        self
    }

    pub fn union_graph(&self) -> &Graph {
        &self.union
    }

    pub fn context(&self) -> &SimilarityContext {
        &self.ctx
    }

    pub fn score(&self, v: VertexId) -> ScoredNeighborhood {
        score_neighborhood(&self.ctx, &self.cfg, v, self.union.adj(v))
    }

    /// Neighbors chosen by `v`, best first. Empty for isolated vertices.
    pub fn select(&self, v: VertexId) -> Vec<VertexId> {
        let gamma = self.union.adj(v);
        if gamma.is_empty() {
            return Vec::new();
        }
        let scored = self.score(v);
        let ranking: Vec<f64> = if self.weighted {
            scored
                .blended
                .iter()
                .zip(gamma)
                .map(|(s, &j)| s * self.g_topo.edge_weight(v, j).unwrap_or(1.0))
                .collect()
        } else {
            scored.blended
        };
        let retain = retention_count(gamma.len()).expect("non-empty neighborhood");
        select_top(gamma, &ranking, retain)
    }

    /// Per-vertex selections for every vertex.
    pub fn selections(&self) -> Vec<Vec<VertexId>> {
        let n = self.union.vertex_count() as VertexId;
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(|v| self.select(v)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..n).map(|v| self.select(v)).collect()
        }
    }

    /// Merge selections into the sampled graph.
    pub fn run(&self) -> Result<Graph> {
        let selections = self.selections();
        let edges: EdgeSet = match self.cfg.retention {
            Retention::Either => selections
                .iter()
                .enumerate()
                .flat_map(|(v, sel)| sel.iter().map(move |&j| (v as VertexId, j)))
                .collect(),
            Retention::Both => selections
                .iter()
                .enumerate()
                .flat_map(|(v, sel)| {
                    let selections = &selections;
                    sel.iter()
                        .filter(move |&&j| selections[j as usize].contains(&(v as VertexId)))
                        .map(move |&j| (v as VertexId, j))
                })
                .collect(),
        };
        let n = self.g_topo.vertex_count();
        if self.g_topo.is_weighted() {
            Graph::from_weighted(
                n,
                edges
                    .iter()
                    .map(|(u, v)| (u, v, self.g_topo.edge_weight(u, v).unwrap_or(1.0))),
            )
        } else {
            Graph::from_edge_set(n, edges)
        }
    }
}

/// Samples the union of topological and content edges.
pub fn sample_edges(
    g_topo: &Graph,
    content_edges: &EdgeSet,
    store: &TermVectorStore,
    cfg: &SamplerConfig,
) -> Result<Graph> {
    Sampler::new(g_topo, content_edges, store, cfg)?.run()
}

/// Like [`sample_edges`], with blended scores multiplied by edge weight.
/// Content-only edges count with weight 1.
pub fn sample_edges_weighted(
    g_topo: &Graph,
    content_edges: &EdgeSet,
    store: &TermVectorStore,
    cfg: &SamplerConfig,
) -> Result<Graph> {
    if let Some(w) = g_topo.weights() {
        if let Some((i, &bad)) = w.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
            let (u, v) = g_topo.edges().as_slice()[i];
            return Err(Error::NonPositiveWeight {
                u: u as usize,
                v: v as usize,
                weight: bad,
            });
        }
    }
    Sampler::new(g_topo, content_edges, store, cfg)?
        .weighted()
        .run()
}

/// Wall time of each pipeline stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub content_edges_ms: f64,
    pub union_ms: f64,
    pub sampling_ms: f64,
    pub clustering_ms: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Result of a full pipeline run.
#[derive(Debug, Clone)]
pub struct CodicilRun {
    pub content_edges: EdgeSet,
    pub union_edges: usize,
    pub sampled: Graph,
    pub clustering: Clustering,
    pub timings: StageTimings,
}

/// Content edges, union, sampling and clustering in one call.
pub fn codicil(
    g_topo: &Graph,
    store: &TermVectorStore,
    cfg: &SamplerConfig,
    l: usize,
    clusterer: &dyn Clusterer,
) -> Result<CodicilRun> {
    cfg.validate()?;
    let mut timings = StageTimings::default();

    let t = Instant::now();
    let content_edges =
        ContentIndex::build(store, cfg.m).content_edges(cfg.k, cfg.scope, Some(g_topo))?;
    timings.content_edges_ms = ms(t.elapsed());

    let t = Instant::now();
    let union_edges = build_edge_union(g_topo.edges(), &content_edges).len();
    timings.union_ms = ms(t.elapsed());

    let t = Instant::now();
    let sampler = Sampler::new(g_topo, &content_edges, store, cfg)?;
    let sampled = if g_topo.is_weighted() {
        sampler.weighted().run()?
    } else {
        sampler.run()?
    };
    timings.sampling_ms = ms(t.elapsed());

    let t = Instant::now();
    let clustering = clusterer.cluster(&sampled, l)?;
    timings.clustering_ms = ms(t.elapsed());

    log::info!(
        "content edges {}, union {}, sampled {}, clusters {}",
        content_edges.len(),
        union_edges,
        sampled.edge_count(),
        clustering.cluster_count()
    );
    Ok(CodicilRun {
        content_edges,
        union_edges,
        sampled,
        clustering,
        timings,
    })
}
