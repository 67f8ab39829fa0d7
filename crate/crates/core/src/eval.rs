//! Best-match F-score against overlapping ground truth.
//!
//! Each predicted cluster `p` is matched to the ground-truth cluster with the
//! highest F-score (harmonic mean of `|p∩g|/|p|` and `|p∩g|/|g|`); the
//! aggregate weights each cluster's best score by `|p| / |V|`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cluster::Clustering;
use crate::error::{Error, Result};
use crate::graph::VertexSet;

pub fn fscore_pair(p: &VertexSet, g: &VertexSet) -> Result<f64> {
    if p.is_empty() || g.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let inter = p.intersection_len(g);
    if inter == 0 {
        return Ok(0.0);
    }
    let precision = inter as f64 / p.len() as f64;
    let recall = inter as f64 / g.len() as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Best F-score of `p` over the ground truth and the index of the matching
/// cluster (smallest index on ties).
pub fn fscore_best(p: &VertexSet, truth: &Clustering) -> Result<(f64, usize)> {
    if truth.cluster_count() == 0 {
        return Err(Error::Config("ground truth has no clusters".into()));
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for (id, g) in truth.clusters().iter().enumerate() {
        let f = fscore_pair(p, g)?;
        if f > best.0 {
            best = (f, id);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterScore {
    pub size: usize,
    pub best_f: f64,
    pub matched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub fscore: f64,
    pub universe_size: usize,
    pub clusters: Vec<ClusterScore>,
    /// Cluster size to number of predicted clusters of that size.
    pub size_histogram: BTreeMap<usize, usize>,
}

impl EvalReport {
    /// `key: value` text form.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "fscore: {:.6}\nuniverse_size: {}\npredicted_clusters: {}\n",
            self.fscore,
            self.universe_size,
            self.clusters.len()
        );
        let hist: Vec<String> = self
            .size_histogram
            .iter()
            .map(|(size, count)| format!("{size}x{count}"))
            .collect();
        s.push_str(&format!("size_histogram: {}\n", hist.join(" ")));
        s
    }
}

/// Size-weighted mean of best-match F-scores over a predicted partition.
pub fn fscore_clustering(
    predicted: &Clustering,
    truth: &Clustering,
    universe_size: usize,
) -> Result<EvalReport> {
    let total: usize = predicted.sizes().iter().sum();
    if total != universe_size {
        return Err(Error::NotAPartition(format!(
            "cluster sizes sum to {total}, universe has {universe_size} vertices"
        )));
    }
    if !predicted.is_partition() {
        return Err(Error::NotAPartition("clusters overlap".into()));
    }
    let mut clusters = Vec::with_capacity(predicted.cluster_count());
    let mut size_histogram = BTreeMap::new();
    let mut fscore = 0.0;
    for p in predicted.clusters() {
        let (best_f, matched) = fscore_best(p, truth)?;
        fscore += p.len() as f64 / universe_size as f64 * best_f;
        *size_histogram.entry(p.len()).or_insert(0) += 1;
        clusters.push(ClusterScore {
            size: p.len(),
            best_f,
            matched,
        });
    }
    Ok(EvalReport {
        fscore,
        universe_size,
        clusters,
        size_histogram,
    })
}

/// Restricts both clusterings to the vertices of `keep` (ground-truth
/// vertices outside the evaluated subgraph are dropped), renumbering to
/// `0..keep.len()`.
pub fn restrict(
    predicted: &Clustering,
    truth: &Clustering,
    keep: &VertexSet,
) -> Result<(Clustering, Clustering)> {
    let labels = predicted
        .assignment()
        .ok_or_else(|| Error::NotAPartition("predicted clustering overlaps".into()))?;
    let index = |v: u32| keep.as_slice().binary_search(&v).ok().map(|i| i as u32);
    let sub_labels: Vec<u32> = keep.iter().map(|v| labels[v as usize]).collect();
    let sub_truth = truth
        .clusters()
        .iter()
        .map(|g| g.iter().filter_map(index).collect())
        .collect();
    Ok((
        Clustering::from_assignment(&sub_labels),
        Clustering::from_clusters(keep.len(), sub_truth)?,
    ))
}
