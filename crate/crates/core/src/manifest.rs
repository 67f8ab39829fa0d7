//! Run manifest: enough configuration to rerun, plus timings and counts.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cluster::{Backend, Mcl};
use crate::error::{Error, Result};
use crate::sampler::{SamplerConfig, StageTimings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Root seed; stage seeds are derived from it.
    pub seed: u64,
    pub sampler: SamplerConfig,
    pub l: usize,
    pub backend: Backend,
    pub mcl: Mcl,
    pub lp_max_sweeps: usize,
    pub partitioner: Option<String>,
    pub threads: usize,
    pub inputs: Inputs,
    pub timings: StageTimings,
    pub eval_ms: Option<f64>,
    pub counts: EdgeCounts,
    pub requested_clusters: usize,
    pub realized_clusters: usize,
    pub fscore: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inputs {
    pub graph: String,
    pub terms: Option<String>,
    pub truth: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCounts {
    pub topological: usize,
    pub content: usize,
    pub union: usize,
    pub sampled: usize,
}

impl RunManifest {
    pub fn check(&self) -> Result<()> {
        if self.counts.sampled > self.counts.union {
            return Err(Error::Config(format!(
                "sampled edge count {} exceeds union {}",
                self.counts.sampled, self.counts.union
            )));
        }
        let t = &self.timings;
        let all = [
            t.content_edges_ms,
            t.union_ms,
            t.sampling_ms,
            t.clustering_ms,
        ];
        if all.iter().chain(self.eval_ms.iter()).any(|&x| !(x >= 0.0)) {
            return Err(Error::Config("negative stage time".into()));
        }
        self.sampler.validate()
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)
            .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
        writeln!(out)?;
        Ok(())
    }

    pub fn read<R: Read>(reader: R) -> Result<Self> {
        serde_json::from_reader(reader).map_err(|e| Error::Parse {
            line: e.line(),
            message: format!("manifest: {e}"),
        })
    }
}
