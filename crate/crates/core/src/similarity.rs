//! Similarity kernels and the per-neighborhood normalizers.
//!
//! Exact cosine and Jaccard, MinHash signatures for Jaccard estimation and
//! random-hyperplane (SimHash) signatures for cosine estimation. All hashing
//! is a pure function of the input, the seed and the signature length.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::sorted_intersection_len;
use crate::seed::{rng, splitmix64};

/// Sparse real vector with entries sorted by index and a cached 2-norm.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
    norm: f64,
}

impl SparseVector {
    /// Builds a vector from `(index, value)` pairs. Zero values are dropped and
    /// repeated indices summed.
    pub fn new(entries: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut raw: Vec<(u32, f64)> = entries.into_iter().collect();
        raw.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(raw.len());
        for (i, x) in raw {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += x,
                _ => merged.push((i, x)),
            }
        }
        merged.retain(|&(_, x)| x != 0.0);
        Self::from_sorted(merged)
    }

    pub(crate) fn from_sorted(entries: Vec<(u32, f64)>) -> Self {
        let norm = entries.iter().map(|&(_, x)| x * x).sum::<f64>().sqrt();
        Self { entries, norm }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: u32) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |p| self.entries[p].1)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.entries.iter().map(|&(i, x)| (i, x * c)))
    }

    /// Support indices, ascending.
    pub fn support(&self) -> Vec<u32> {
        self.entries.iter().map(|&(i, _)| i).collect()
    }
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(x: &SparseVector, y: &SparseVector) -> f64 {
    if x.norm == 0.0 || y.norm == 0.0 {
        return 0.0;
    }
    (x.dot(y) / (x.norm * y.norm)).clamp(-1.0, 1.0)
}

/// Cosine between the indicator vectors of two sorted id sets.
pub fn set_cosine(a: &[u32], b: &[u32]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    sorted_intersection_len(a, b) as f64 / ((a.len() * b.len()) as f64).sqrt()
}

/// Jaccard coefficient of two sorted id sets; 0 when both are empty.
pub fn jaccard(a: &[u32], b: &[u32]) -> f64 {
    let inter = sorted_intersection_len(a, b);
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Seeded family of `h` hash functions emulating random permutations.
///
/// Each function is an affine map with an odd multiplier followed by a
/// SplitMix finalizer. Both steps are bijections on `u64`, so each function
/// is a permutation of the 64-bit key space.
#[derive(Debug, Clone)]
pub struct MinHasher {
    seed: u64,
    params: Vec<(u64, u64)>,
}

impl MinHasher {
    pub fn new(h: usize, seed: u64) -> Result<Self> {
        if h == 0 {
            return Err(Error::Config("hash count must be at least 1".into()));
        }
        let mut r = rng(seed);
        let params = (0..h)
            .map(|_| (r.gen::<u64>() | 1, r.gen::<u64>()))
            .collect();
        Ok(Self { seed, params })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// The `i`-th hash of `x`.
    pub fn hash(&self, i: usize, x: u64) -> u64 {
        let (a, b) = self.params[i];
        splitmix64(x.wrapping_mul(a).wrapping_add(b))
    }

    pub fn signature(&self, set: &[u32]) -> Result<MinHashSignature> {
        if set.is_empty() {
            return Err(Error::EmptySignatureInput);
        }
        let mins = (0..self.params.len())
            .map(|i| set.iter().map(|&x| self.hash(i, x as u64)).min().unwrap())
            .collect();
        Ok(MinHashSignature {
            seed: self.seed,
            mins,
        })
    }
}

/// Per-function minimum hash values of a set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHashSignature {
    pub seed: u64,
    pub mins: Vec<u64>,
}

impl MinHashSignature {
    pub fn len(&self) -> usize {
        self.mins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mins.is_empty()
    }
}

pub fn minhash_signature(set: &[u32], h: usize, seed: u64) -> Result<MinHashSignature> {
    MinHasher::new(h, seed)?.signature(set)
}

/// Fraction of agreeing minima; unbiased for the Jaccard coefficient.
pub fn estimate_jaccard(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64> {
    if a.mins.len() != b.mins.len() || a.seed != b.seed {
        return Err(Error::SignatureMismatch(format!(
            "h={} seed={} vs h={} seed={}",
            a.mins.len(),
            a.seed,
            b.mins.len(),
            b.seed
        )));
    }
    let agree = a.mins.iter().zip(&b.mins).filter(|(x, y)| x == y).count();
    Ok(agree as f64 / a.mins.len() as f64)
}

/// Random-hyperplane signature: bit `i` is set when `x . r_i >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimHashSignature {
    pub seed: u64,
    pub bits: usize,
    pub words: Vec<u64>,
}

impl SimHashSignature {
    pub fn bit(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }
}

/// Projection signs for one coordinate: bit `i` of the returned words is the
/// sign of `r_i[index]` (set means +1).
fn projection_words(seed: u64, index: u32, words: usize) -> impl Iterator<Item = u64> {
    let base = splitmix64(seed ^ splitmix64(index as u64 ^ 0x5349_4D48_4153_4800));
    (0..words as u64).map(move |w| splitmix64(base.wrapping_add(w)))
}

pub fn simhash_signature(x: &SparseVector, bits: usize, seed: u64) -> Result<SimHashSignature> {
    if bits == 0 {
        return Err(Error::Config("signature length must be at least 1".into()));
    }
    if x.is_empty() {
        return Err(Error::EmptySignatureInput);
    }
    let nwords = bits.div_ceil(64);
    let mut acc = vec![0.0f64; bits];
    for &(index, value) in x.entries() {
        for (w, signs) in projection_words(seed, index, nwords).enumerate() {
            let lo = w * 64;
            for (k, slot) in acc[lo..(lo + 64).min(bits)].iter_mut().enumerate() {
                if signs >> k & 1 == 1 {
                    *slot += value;
                } else {
                    *slot -= value;
                }
            }
        }
    }
    let mut words = vec![0u64; nwords];
    for (i, &dot) in acc.iter().enumerate() {
        if dot >= 0.0 {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    Ok(SimHashSignature { seed, bits, words })
}

/// Inverts the collision identity `P[agree] = 1 - theta / pi`.
pub fn estimate_cosine(a: &SimHashSignature, b: &SimHashSignature) -> Result<f64> {
    if a.bits != b.bits || a.seed != b.seed {
        return Err(Error::SignatureMismatch(format!(
            "b={} seed={} vs b={} seed={}",
            a.bits, a.seed, b.bits, b.seed
        )));
    }
    let differ: u32 = a
        .words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones())
        .sum();
    let agreement = 1.0 - differ as f64 / a.bits as f64;
    Ok((PI * (1.0 - agreement)).cos())
}

/// Rescale to `[0, 1]`; a constant input maps to 0.5 everywhere.
pub fn zero_one_normalize(s: &[f64]) -> Vec<f64> {
    let (min, max) = s
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if !(max > min) {
        return vec![0.5; s.len()];
    }
    s.iter().map(|&x| (x - min) / (max - min)).collect()
}

/// Zero mean, unit sample variance; degenerate inputs map to 0 everywhere.
pub fn z_normalize(s: &[f64]) -> Vec<f64> {
    let n = s.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mean = s.iter().sum::<f64>() / n as f64;
    let var = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    if sd == 0.0 {
        return vec![0.0; n];
    }
    s.iter().map(|x| (x - mean) / sd).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalizer {
    ZeroOne,
    ZNorm,
}

impl Normalizer {
    pub fn apply(self, s: &[f64]) -> Vec<f64> {
        match self {
            Normalizer::ZeroOne => zero_one_normalize(s),
            Normalizer::ZNorm => z_normalize(s),
        }
    }
}
