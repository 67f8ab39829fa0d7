//! Content-agnostic clustering backends and clustering file formats.
//!
//! Built in: Markov clustering and asynchronous label propagation. The
//! external bridge writes the usual multilevel-partitioner adjacency format,
//! runs a partitioner program and reads back one label per vertex.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::Command;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, VertexSet};
use crate::seed::rng;

/// A disjoint (predicted) or overlapping (ground truth) clustering.
///
/// Cluster ids are dense from 0. Built from an assignment, clusters are
/// ordered by their smallest member, so equal partitions compare equal
/// regardless of the original labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    vertex_count: usize,
    clusters: Vec<VertexSet>,
}

impl Clustering {
    /// Disjoint clustering from one label per vertex.
    pub fn from_assignment(labels: &[u32]) -> Self {
        let mut remap: HashMap<u32, usize> = HashMap::new();
        let mut clusters: Vec<Vec<VertexId>> = Vec::new();
        for (v, &l) in labels.iter().enumerate() {
            let id = *remap.entry(l).or_insert_with(|| {
                clusters.push(Vec::new());
                clusters.len() - 1
            });
            clusters[id].push(v as VertexId);
        }
        Self {
            vertex_count: labels.len(),
            clusters: clusters.into_iter().map(VertexSet::from_sorted).collect(),
        }
    }

    /// Possibly overlapping clusters over `vertex_count` vertices. Empty
    /// clusters are dropped.
    pub fn from_clusters(vertex_count: usize, clusters: Vec<VertexSet>) -> Result<Self> {
        for c in &clusters {
            if let Some(v) = c.iter().find(|&v| v as usize >= vertex_count) {
                return Err(Error::VertexOutOfRange {
                    vertex: v as usize,
                    vertex_count,
                });
            }
        }
        Ok(Self {
            vertex_count,
            clusters: clusters.into_iter().filter(|c| !c.is_empty()).collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn clusters(&self) -> &[VertexSet] {
        &self.clusters
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(VertexSet::len).collect()
    }

    /// Label per vertex, or `None` unless every vertex is in exactly one cluster.
    pub fn assignment(&self) -> Option<Vec<u32>> {
        let mut labels = vec![u32::MAX; self.vertex_count];
        for (id, c) in self.clusters.iter().enumerate() {
            for v in c.iter() {
                if labels[v as usize] != u32::MAX {
                    return None;
                }
                labels[v as usize] = id as u32;
            }
        }
        labels.iter().all(|&l| l != u32::MAX).then_some(labels)
    }

    pub fn is_partition(&self) -> bool {
        self.assignment().is_some()
    }

    /// Clustering with the cluster list in canonical order.
    pub fn canonical(&self) -> Self {
        let mut clusters = self.clusters.clone();
        clusters.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
        Self {
            vertex_count: self.vertex_count,
            clusters,
        }
    }
}

/// Writes `vertex_id cluster_id` lines.
pub fn write_assignment<W: Write>(clustering: &Clustering, mut out: W) -> Result<()> {
    let labels = clustering
        .assignment()
        .ok_or_else(|| Error::NotAPartition("cannot write an overlapping clustering".into()))?;
    for (v, l) in labels.iter().enumerate() {
        writeln!(out, "{v} {l}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `vertex_id cluster_id` lines; every vertex must appear exactly once.
pub fn read_assignment<R: BufRead>(reader: R) -> Result<Clustering> {
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut toks = body.split_whitespace();
        let parsed = (|| {
            let v: usize = toks.next()?.parse().ok()?;
            let c: u32 = toks.next()?.parse().ok()?;
            toks.next().is_none().then_some((v, c))
        })();
        pairs.push(parsed.ok_or_else(|| Error::Parse {
            line: idx + 1,
            message: "expected `vertex_id cluster_id`".into(),
        })?);
    }
    let n = pairs.len();
    let mut labels = vec![None; n];
    for (v, c) in pairs {
        match labels.get_mut(v) {
            Some(slot @ None) => *slot = Some(c),
            Some(Some(_)) => {
                return Err(Error::NotAPartition(format!("vertex {v} assigned twice")))
            }
            None => {
                return Err(Error::NotAPartition(format!(
                    "vertex {v} out of range for {n} lines"
                )))
            }
        }
    }
    let labels: Vec<u32> = labels.into_iter().map(|l| l.unwrap()).collect();
    Ok(Clustering::from_assignment(&labels))
}

/// Reads ground truth: one cluster per line, whitespace-separated vertex ids.
pub fn load_ground_truth<R: BufRead>(reader: R, vertex_count: usize) -> Result<Clustering> {
    let mut clusters = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let ids = body
            .split_whitespace()
            .map(|t| t.parse::<VertexId>())
            .collect::<std::result::Result<VertexSet, _>>()
            .map_err(|_| Error::Parse {
                line: idx + 1,
                message: "expected vertex ids".into(),
            })?;
        clusters.push(ids);
    }
    Clustering::from_clusters(vertex_count, clusters)
}

pub fn write_ground_truth<W: Write>(clustering: &Clustering, mut out: W) -> Result<()> {
    for c in clustering.clusters() {
        let line: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes the partitioner interchange format: `n m`, then for each vertex its
/// 1-indexed neighbors.
pub fn export_partitioner_graph<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", graph.vertex_count(), graph.edge_count())?;
    for v in 0..graph.vertex_count() as VertexId {
        let line: Vec<String> = graph.adj(v).iter().map(|u| (u + 1).to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads one integer label per line, exactly `vertex_count` lines.
pub fn import_partition<R: BufRead>(reader: R, vertex_count: usize) -> Result<Clustering> {
    let mut labels = Vec::with_capacity(vertex_count);
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() {
            continue;
        }
        labels.push(body.parse::<u32>().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("non-integer label `{body}`"),
        })?);
    }
    if labels.len() != vertex_count {
        return Err(Error::PartitionLineCount {
            expected: vertex_count,
            actual: labels.len(),
        });
    }
    Ok(Clustering::from_assignment(&labels))
}

/// A content-agnostic graph clustering algorithm.
pub trait Clusterer: Send + Sync {
    fn name(&self) -> &str;

    /// Partition `graph`; `l` is the requested cluster count, which backends
    /// that discover their own count may ignore.
    fn cluster(&self, graph: &Graph, l: usize) -> Result<Clustering>;
}

/// Markov clustering: alternate expansion (squaring the column-stochastic
/// transition matrix) and inflation (elementwise power, renormalized) until
/// the matrix stops changing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mcl {
    pub inflation: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub self_loop: f64,
    /// Entries below this are dropped after each inflation.
    pub prune: f64,
}

impl Default for Mcl {
    fn default() -> Self {
        Self {
            inflation: 2.0,
            max_iter: 100,
            tol: 1e-6,
            self_loop: 1.0,
            prune: 1e-5,
        }
    }
}

/// Column-major sparse matrix; column `j` holds `(row, value)` sorted by row.
pub type Columns = Vec<Vec<(u32, f64)>>;

impl Mcl {
    fn transition_matrix(&self, graph: &Graph) -> Columns {
        (0..graph.vertex_count() as VertexId)
            .map(|j| {
                let mut col: Vec<(u32, f64)> = graph
                    .adj(j)
                    .iter()
                    .map(|&i| (i, graph.edge_weight(i, j).unwrap_or(1.0)))
                    .collect();
                let pos = col.partition_point(|&(i, _)| i < j);
                col.insert(pos, (j, self.self_loop));
                normalize_column(&mut col);
                col
            })
            .collect()
    }

    fn expand(m: &Columns) -> Columns {
        let n = m.len();
        let mut acc = vec![0.0f64; n];
        let mut touched: Vec<u32> = Vec::new();
        m.iter()
            .map(|col| {
                for &(k, mkj) in col {
                    for &(i, mik) in &m[k as usize] {
                        if acc[i as usize] == 0.0 {
                            touched.push(i);
                        }
                        acc[i as usize] += mik * mkj;
                    }
                }
                touched.sort_unstable();
                let out = touched
                    .drain(..)
                    .map(|i| (i, std::mem::take(&mut acc[i as usize])))
                    .collect();
                out
            })
            .collect()
    }

    fn inflate(&self, m: &mut Columns) {
        for col in m.iter_mut() {
            for e in col.iter_mut() {
                e.1 = e.1.powf(self.inflation);
            }
            normalize_column(col);
            let keep_max = col.iter().map(|e| e.1).fold(0.0, f64::max);
            col.retain(|e| e.1 >= self.prune || e.1 == keep_max);
            normalize_column(col);
        }
    }

    /// Runs to convergence and returns the final matrix.
    pub fn iterate(&self, graph: &Graph) -> Columns {
        let mut m = self.transition_matrix(graph);
        for _ in 0..self.max_iter {
            let mut next = Self::expand(&m);
            self.inflate(&mut next);
            let delta = max_abs_diff(&m, &next);
            m = next;
            if delta < self.tol {
                break;
            }
        }
        m
    }
}

fn normalize_column(col: &mut [(u32, f64)]) {
    let s: f64 = col.iter().map(|e| e.1).sum();
    if s > 0.0 {
        for e in col.iter_mut() {
            e.1 /= s;
        }
    }
}

fn max_abs_diff(a: &Columns, b: &Columns) -> f64 {
    let mut worst = 0.0f64;
    for (ca, cb) in a.iter().zip(b) {
        let (mut i, mut j) = (0, 0);
        while i < ca.len() || j < cb.len() {
            let ra = ca.get(i).map_or(u32::MAX, |e| e.0);
            let rb = cb.get(j).map_or(u32::MAX, |e| e.0);
            let d = if ra == rb {
                i += 1;
                j += 1;
                (ca[i - 1].1 - cb[j - 1].1).abs()
            } else if ra < rb {
                i += 1;
                ca[i - 1].1
            } else {
                j += 1;
                cb[j - 1].1
            };
            worst = worst.max(d);
        }
    }
    worst
}

/// Column sums of a sparse column matrix.
pub fn column_sums(m: &Columns) -> Vec<f64> {
    m.iter().map(|c| c.iter().map(|e| e.1).sum()).collect()
}

impl Clusterer for Mcl {
    fn name(&self) -> &str {
        "mcl"
    }

    fn cluster(&self, graph: &Graph, _l: usize) -> Result<Clustering> {
        if !(self.inflation > 1.0) {
            return Err(Error::Config("MCL inflation must exceed 1".into()));
        }
        let m = self.iterate(graph);
        // Vertices are linked to the attractors their flow ends in; clusters
        // are the connected components of that pattern.
        let n = graph.vertex_count();
        let pattern = m
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(i, _)| (i, j as VertexId)));
        let flow = Graph::new(n, pattern)?;
        Ok(Clustering::from_assignment(&flow.component_labels()))
    }
}

/// Asynchronous label propagation over a seeded shuffled order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelPropagation {
    pub seed: u64,
    pub max_sweeps: usize,
}

impl Default for LabelPropagation {
    fn default() -> Self {
        Self {
            seed: 0,
            max_sweeps: 100,
        }
    }
}

impl LabelPropagation {
    pub fn labels(&self, graph: &Graph) -> Vec<u32> {
        let n = graph.vertex_count();
        let mut labels: Vec<u32> = (0..n as u32).collect();
        let mut order: Vec<VertexId> = (0..n as VertexId).collect();
        let mut r = rng(self.seed);
        let mut weight_of: HashMap<u32, f64> = HashMap::new();
        for _ in 0..self.max_sweeps {
            order.shuffle(&mut r);
            let mut changed = false;
            for &v in &order {
                let adj = graph.adj(v);
                if adj.is_empty() {
                    continue;
                }
                weight_of.clear();
                for &u in adj {
                    *weight_of.entry(labels[u as usize]).or_insert(0.0) +=
                        graph.edge_weight(v, u).unwrap_or(1.0);
                }
                let best = weight_of
                    .iter()
                    .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0)))
                    .map(|(&l, _)| l)
                    .unwrap();
                if best != labels[v as usize] {
                    labels[v as usize] = best;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        labels
    }
}

impl Clusterer for LabelPropagation {
    fn name(&self) -> &str {
        "lp"
    }

    fn cluster(&self, graph: &Graph, _l: usize) -> Result<Clustering> {
        Ok(Clustering::from_assignment(&self.labels(graph)))
    }
}

/// Bridge to an external partitioner invoked as `program <graph-file> <l>`,
/// which must write `<graph-file>.part.<l>` (the gpmetis convention).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalPartitioner {
    pub program: PathBuf,
    pub extra_args: Vec<String>,
    pub work_dir: PathBuf,
}

impl ExternalPartitioner {
    pub fn new(program: impl Into<PathBuf>, work_dir: impl Into<PathBuf>) -> Self {
        Self {
            program: program.into(),
            extra_args: Vec::new(),
            work_dir: work_dir.into(),
        }
    }

    pub fn graph_path(&self) -> PathBuf {
        self.work_dir.join("partitioner.graph")
    }

    pub fn partition_path(&self, l: usize) -> PathBuf {
        let mut p = self.graph_path().into_os_string();
        p.push(format!(".part.{l}"));
        p.into()
    }

    /// True if the program can be spawned.
    pub fn available(&self) -> bool {
        Command::new(&self.program).arg("-help").output().is_ok()
    }
}

impl Clusterer for ExternalPartitioner {
    fn name(&self) -> &str {
        "external"
    }

    fn cluster(&self, graph: &Graph, l: usize) -> Result<Clustering> {
        if l < 2 {
            return Ok(Clustering::from_assignment(&vec![0; graph.vertex_count()]));
        }
        std::fs::create_dir_all(&self.work_dir)?;
        let graph_path = self.graph_path();
        export_partitioner_graph(
            graph,
            std::io::BufWriter::new(std::fs::File::create(&graph_path)?),
        )?;
        let output = Command::new(&self.program)
            .args(&self.extra_args)
            .arg(&graph_path)
            .arg(l.to_string())
            .output()
            .map_err(|e| Error::External(format!("{}: {e}", self.program.display())))?;
        if !output.status.success() {
            return Err(Error::External(format!(
                "{} exited with {}: {}",
                self.program.display(),
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        read_partition_file(&self.partition_path(l), graph.vertex_count())
    }
}

fn read_partition_file(path: &Path, vertex_count: usize) -> Result<Clustering> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::External(format!("reading {}: {e}", path.display())))?;
    import_partition(std::io::BufReader::new(file), vertex_count)
}

/// Backend selector used by the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Mcl,
    Lp,
    External,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mcl" => Ok(Self::Mcl),
            "lp" => Ok(Self::Lp),
            "external" => Ok(Self::External),
            other => Err(Error::UnknownBackend(other.to_string())),
        }
    }
}
