//! Browser bindings: sample and cluster a planted-partition graph, compare
//! Laplacian spectra before and after sampling, and probe the similarity
//! estimators. Every entry point returns a JSON string.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use codicil::cluster::{Clusterer, Mcl};
use codicil::eval::fscore_clustering;
use codicil::graph::{laplacian_spectrum, zero_multiplicity, SpectrumOptions, ZERO_TOLERANCE};
use codicil::sampler::{Sampler, SamplerConfig, SimilarityKind};
use codicil::similarity::{
    cosine, estimate_cosine, estimate_jaccard, jaccard, minhash_signature, simhash_signature,
    SparseVector,
};
use codicil::synth::{PlantedInstance, PlantedPartition};
use codicil::text::ContentIndex;
use codicil::{Graph, Result};

/// Largest graph the page will build.
const MAX_VERTICES: usize = 400;

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct SampleRequest {
    pub communities: usize,
    pub size: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub noise: f64,
    pub seed: u64,
    pub k: usize,
    pub alpha: f64,
    pub similarity: SimilarityKind,
    pub inflation: f64,
}

impl Default for SampleRequest {
    fn default() -> Self {
        let p = PlantedPartition::default();
        Self {
            communities: p.communities,
            size: p.size,
            p_in: p.p_in,
            p_out: p.p_out,
            noise: p.noise,
            seed: 1,
            k: 10,
            alpha: 0.5,
            similarity: SimilarityKind::CosineExact,
            inflation: 1.4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleResponse {
    pub vertex_count: usize,
    pub topological: Vec<(u32, u32)>,
    pub content: Vec<(u32, u32)>,
    pub sampled: Vec<(u32, u32)>,
    pub truth: Vec<u32>,
    pub clusters: Vec<u32>,
    pub cluster_count: usize,
    pub fscore: f64,
}

struct Sampled {
    instance: PlantedInstance,
    content: codicil::EdgeSet,
    sampled: Graph,
}

fn run_sampler(req: &SampleRequest) -> Result<Sampled> {
    let spec = PlantedPartition {
        communities: req.communities,
        size: req.size,
        p_in: req.p_in,
        p_out: req.p_out,
        noise: req.noise,
        ..Default::default()
    };
    if spec.vertex_count() > MAX_VERTICES || spec.vertex_count() == 0 {
        return Err(codicil::Error::Config(format!(
            "between 1 and {MAX_VERTICES} vertices, got {}",
            spec.vertex_count()
        )));
    }
    for (name, p) in [
        ("p_in", req.p_in),
        ("p_out", req.p_out),
        ("noise", req.noise),
    ] {
        if !(0.0..=1.0).contains(&p) {
            return Err(codicil::Error::Config(format!("{name} must lie in [0, 1]")));
        }
    }
    let instance = spec.generate(req.seed);
    let cfg = SamplerConfig {
        k: req.k,
        alpha: req.alpha,
        similarity: req.similarity,
        seed: req.seed,
        ..Default::default()
    };
    cfg.validate()?;
    let content =
        ContentIndex::build(&instance.terms, cfg.m).content_edges(cfg.k, cfg.scope, None)?;
    let sampled = Sampler::new(&instance.graph, &content, &instance.terms, &cfg)?.run()?;
    Ok(Sampled {
        instance,
        content,
        sampled,
    })
}

/// Planted graph, content edges, sampled backbone and its MCL clustering.
pub fn sample_planted(req: &SampleRequest) -> Result<SampleResponse> {
    let s = run_sampler(req)?;
    let mcl = Mcl {
        inflation: req.inflation,
        ..Default::default()
    };
    let clustering = mcl.cluster(&s.sampled, req.communities)?;
    let n = s.instance.graph.vertex_count();
    let fscore = fscore_clustering(&clustering, &s.instance.truth, n)?.fscore;
    Ok(SampleResponse {
        vertex_count: n,
        topological: s.instance.graph.edges().iter().collect(),
        content: s.content.iter().collect(),
        sampled: s.sampled.edges().iter().collect(),
        truth: s.instance.truth.assignment().unwrap_or_default(),
        clusters: clustering.assignment().unwrap_or_default(),
        cluster_count: clustering.cluster_count(),
        fscore,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResponse {
    pub original: Vec<f64>,
    pub sampled: Vec<f64>,
    pub original_components: usize,
    pub sampled_components: usize,
}

/// Smallest Laplacian eigenvalues of the topology and of the sampled graph.
pub fn compare_spectra(req: &SampleRequest, count: usize) -> Result<SpectrumResponse> {
    let s = run_sampler(req)?;
    let count = count.min(s.instance.graph.vertex_count());
    let opts = SpectrumOptions::default();
    let original = laplacian_spectrum(&s.instance.graph, count, opts)?;
    let sampled = laplacian_spectrum(&s.sampled, count, opts)?;
    Ok(SpectrumResponse {
        original_components: zero_multiplicity(&original, ZERO_TOLERANCE),
        sampled_components: zero_multiplicity(&sampled, ZERO_TOLERANCE),
        original,
        sampled,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimatorPoint {
    pub target: f64,
    pub exact: f64,
    pub estimates: Vec<f64>,
    pub mean: f64,
}

/// MinHash estimates for two 100-element sets with `overlap` shared ids.
pub fn minhash_trials(overlap: u32, hashes: usize, seeds: u64) -> Result<EstimatorPoint> {
    let overlap = overlap.min(100);
    // |A| = |B| and |A ∪ B| = 200 - overlap.
    let a: Vec<u32> = (0..100).collect();
    let b: Vec<u32> = (100 - overlap..200 - overlap).collect();
    let exact = jaccard(&a, &b);
    let estimates = (0..seeds)
        .map(|s| {
            estimate_jaccard(
                &minhash_signature(&a, hashes, s)?,
                &minhash_signature(&b, hashes, s)?,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(point(
        overlap as f64 / (200 - overlap) as f64,
        exact,
        estimates,
    ))
}

/// SimHash estimates for two 2000-dimensional vectors at `degrees` apart.
pub fn simhash_trials(degrees: f64, bits: usize, seeds: u64) -> Result<EstimatorPoint> {
    let th = degrees.to_radians();
    let x = SparseVector::new((0..1000).map(|i| (i, 1.0)));
    let y = SparseVector::new(
        (0..1000)
            .map(|i| (i, th.cos()))
            .chain((1000..2000).map(|i| (i, th.sin()))),
    );
    let exact = cosine(&x, &y);
    let estimates = (0..seeds)
        .map(|s| {
            estimate_cosine(
                &simhash_signature(&x, bits, s)?,
                &simhash_signature(&y, bits, s)?,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(point(th.cos(), exact, estimates))
}

fn point(target: f64, exact: f64, estimates: Vec<f64>) -> EstimatorPoint {
    let mean = estimates.iter().sum::<f64>() / estimates.len().max(1) as f64;
    EstimatorPoint {
        target,
        exact,
        estimates,
        mean,
    }
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

fn parse(json: &str) -> std::result::Result<SampleRequest, JsError> {
    serde_json::from_str(json).map_err(|e| JsError::new(&format!("bad request: {e}")))
}

#[wasm_bindgen(js_name = samplePlanted)]
pub fn sample_planted_js(request: &str) -> std::result::Result<String, JsError> {
    to_js(sample_planted(&parse(request)?))
}

#[wasm_bindgen(js_name = compareSpectra)]
pub fn compare_spectra_js(request: &str, count: usize) -> std::result::Result<String, JsError> {
    to_js(compare_spectra(&parse(request)?, count))
}

#[wasm_bindgen(js_name = minhashTrials)]
pub fn minhash_trials_js(
    overlap: u32,
    hashes: usize,
    seeds: u32,
) -> std::result::Result<String, JsError> {
    to_js(minhash_trials(overlap, hashes, seeds as u64))
}

#[wasm_bindgen(js_name = simhashTrials)]
pub fn simhash_trials_js(
    degrees: f64,
    bits: usize,
    seeds: u32,
) -> std::result::Result<String, JsError> {
    to_js(simhash_trials(degrees, bits, seeds as u64))
}
