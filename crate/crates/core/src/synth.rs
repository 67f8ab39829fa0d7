//! Synthetic graphs and corpora with known structure.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::Clustering;
use crate::graph::{Graph, VertexId};
use crate::seed::rng;
use crate::text::TermVectorStore;

/// Erdős–Rényi graph `G(n, p)`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("ids in range")
}

/// Random sparse term vectors: each vertex gets up to `max_terms` distinct
/// terms from a vocabulary of `vocab` with counts in `1..=max_count`.
pub fn random_terms(
    n: usize,
    vocab: u32,
    max_terms: usize,
    max_count: u32,
    seed: u64,
) -> TermVectorStore {
    let mut r = rng(seed);
    let vectors = (0..n)
        .map(|_| {
            let len = r.gen_range(0..=max_terms);
            (0..len)
                .map(|_| (r.gen_range(0..vocab), r.gen_range(1..=max_count)))
                .collect()
        })
        .collect();
    TermVectorStore::new(vectors)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedPartition {
    pub communities: usize,
    pub size: usize,
    pub p_in: f64,
    pub p_out: f64,
    /// Distinct terms owned by each community.
    pub vocab_per_community: u32,
    /// Tokens drawn per vertex.
    pub tokens: usize,
    /// Probability that a token comes from another community's vocabulary.
    pub noise: f64,
}

impl Default for PlantedPartition {
    fn default() -> Self {
        Self {
            communities: 2,
            size: 50,
            p_in: 0.3,
            p_out: 0.02,
            vocab_per_community: 40,
            tokens: 20,
            noise: 0.1,
        }
    }
}

/// A planted-partition instance: topology, terms and the true communities.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub graph: Graph,
    pub terms: TermVectorStore,
    pub truth: Clustering,
}

impl PlantedPartition {
    pub fn vertex_count(&self) -> usize {
        self.communities * self.size
    }

    pub fn generate(&self, seed: u64) -> PlantedInstance {
        let n = self.vertex_count();
        let community = |v: usize| v / self.size;
        let mut r = rng(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let p = if community(u) == community(v) {
                    self.p_in
                } else {
                    self.p_out
                };
                if r.gen_bool(p) {
                    edges.push((u as VertexId, v as VertexId));
                }
            }
        }
        let vectors = (0..n)
            .map(|v| {
                (0..self.tokens)
                    .map(|_| {
                        let mut c = community(v);
                        if self.communities > 1 && r.gen_bool(self.noise) {
                            c = (c + r.gen_range(1..self.communities)) % self.communities;
                        }
                        let term = c as u32 * self.vocab_per_community
                            + r.gen_range(0..self.vocab_per_community);
                        (term, 1)
                    })
                    .collect()
            })
            .collect();
        let labels: Vec<u32> = (0..n).map(|v| community(v) as u32).collect();
        PlantedInstance {
            graph: Graph::new(n, edges).expect("ids in range"),
            terms: TermVectorStore::new(vectors),
            truth: Clustering::from_assignment(&labels),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_instance_shape() {
        let inst = PlantedPartition::default().generate(1);
        assert_eq!(inst.graph.vertex_count(), 100);
        assert_eq!(inst.terms.corpus_size(), 100);
        assert_eq!(inst.truth.sizes(), vec![50, 50]);
        let inside = inst
            .graph
            .edges()
            .iter()
            .filter(|&(u, v)| u / 50 == v / 50)
            .count();
        assert!(inside > 5 * (inst.graph.edge_count() - inside));
    }

    #[test]
    fn generators_are_seeded() {
        assert_eq!(random_graph(20, 0.3, 5), random_graph(20, 0.3, 5));
        assert_ne!(random_graph(20, 0.3, 5), random_graph(20, 0.3, 6));
        assert_eq!(random_terms(10, 30, 5, 3, 2), random_terms(10, 30, 5, 3, 2));
    }
}
