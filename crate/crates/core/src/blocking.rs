//! Contiguous row partitions and the effective-orthogonality sampling
//! distribution over blocks.
//!
//! Each block is summarized by its centroid (the sum of its rows). The cosine
//! matrix `C(i, j) = |<c_i, c_j>| / (|c_i| |c_j|)` measures how aligned two
//! blocks are, and a block `t` is sampled with probability proportional to
//! `exp(-k · Σ_m C(t, m) / 2)`, so blocks that are nearly orthogonal to all
//! others are preferred.

use std::ops::Range;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::MatrixHandle;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockPartition {
    block_rows: usize,
    ranges: Vec<Range<usize>>,
}

impl BlockPartition {
    pub fn num_blocks(&self) -> usize {
        self.ranges.len()
    }

    /// Nominal rows per block; only the last block may be shorter.
    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn range(&self, t: usize) -> Range<usize> {
        self.ranges[t].clone()
    }

    pub fn total_rows(&self) -> usize {
        self.ranges.last().map_or(0, |r| r.end)
    }
}

/// Splits `m` rows into `⌈m/s⌉` contiguous blocks of `s` rows (the last may be
/// shorter).
pub fn partition_rows(m: usize, s: usize) -> Result<BlockPartition> {
    if s == 0 || s > m {
        return Err(Error::InvalidConfig(format!(
            "block rows must be in [1, {m}], got {s}"
        )));
    }
    let ranges = (0..m)
        .step_by(s)
        .map(|start| start..(start + s).min(m))
        .collect();
    Ok(BlockPartition {
        block_rows: s,
        ranges,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CentroidSet {
    centroids: Vec<Vec<f64>>,
    norms: Vec<f64>,
}

impl CentroidSet {
    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }
}

/// Sums the rows of each block. Linear in `nnz(A)` plus `k·n` for storage.
pub fn compute_centroids(a: &MatrixHandle, part: &BlockPartition) -> Result<CentroidSet> {
    if part.total_rows() != a.rows() {
        return Err(Error::DimensionMismatch {
            context: "partition rows",
            expected: a.rows(),
            actual: part.total_rows(),
        });
    }
    let n = a.cols();
    let centroids: Vec<Vec<f64>> = part
        .ranges()
        .iter()
        .map(|range| {
            let mut c = vec![0.0; n];
            for i in range.clone() {
                a.row(i).axpy_into(1.0, &mut c);
            }
            c
        })
        .collect();
    let norms = centroids
        .iter()
        .map(|c| crate::linalg::vector::norm2(c))
        .collect();
    Ok(CentroidSet { centroids, norms })
}

/// Symmetric `k×k` matrix of absolute centroid cosines.
#[derive(Debug, Clone, Serialize)]
pub struct CosineMatrix {
    k: usize,
    values: Vec<f64>,
}

impl CosineMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        let mut values = Vec::with_capacity(k * k);
        for row in rows {
            if row.len() != k {
                return Err(Error::InvalidMatrix("cosine matrix must be square".into()));
            }
            values.extend_from_slice(row);
        }
        Ok(Self { k, values })
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.k + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.k..(i + 1) * self.k]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }
}

/// A zero centroid is treated as orthogonal to every other block, with a unit
/// self-cosine.
pub fn compute_cosine_matrix(cents: &CentroidSet) -> CosineMatrix {
    let k = cents.len();
    let mut values = vec![0.0; k * k];
    for i in 0..k {
        values[i * k + i] = 1.0;
        let ni = cents.norms[i];
        if ni == 0.0 {
            continue;
        }
        for j in 0..i {
            let nj = cents.norms[j];
            if nj == 0.0 {
                continue;
            }
            let dot = crate::linalg::vector::dot(&cents.centroids[i], &cents.centroids[j]);
            let c = (dot.abs() / (ni * nj)).min(1.0);
            values[i * k + j] = c;
            values[j * k + i] = c;
        }
    }
    CosineMatrix { k, values }
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingDistribution {
    weights: Vec<f64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl SamplingDistribution {
    /// Builds a distribution from explicit (not necessarily normalized)
    /// nonnegative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidConfig("empty sampling distribution".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidConfig(
                "sampling weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        let probs = if total > 0.0 {
            weights.iter().map(|w| w / total).collect()
        } else {
            log::warn!("all block weights are zero; falling back to uniform sampling");
            vec![1.0 / weights.len() as f64; weights.len()]
        };
        Ok(Self::with_probs(weights, probs))
    }

    pub fn uniform(k: usize) -> Self {
        let w = vec![1.0; k];
        let p = vec![1.0 / k as f64; k];
        Self::with_probs(w, p)
    }

    fn with_probs(weights: Vec<f64>, probs: Vec<f64>) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Self {
            weights,
            probs,
            cumulative,
        }
    }

    /// Raw weights `exp(-k · rowsum / 2)`; these may underflow to zero.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// `P_t ∝ exp(-k · Σ_m C(t, m) / 2)`, diagonal included.
///
/// Normalization is carried out relative to the smallest row sum so that large
/// `k` does not underflow every weight; the resulting probabilities equal the
/// literal formula wherever it is representable.
pub fn build_sampling_distribution(c: &CosineMatrix) -> SamplingDistribution {
    let k = c.dim();
    let kf = k as f64;
    let row_sums: Vec<f64> = (0..k).map(|t| c.row_sum(t)).collect();
    let weights: Vec<f64> = row_sums.iter().map(|s| (-kf * s / 2.0).exp()).collect();

    let min_sum = row_sums.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = row_sums
        .iter()
        .map(|s| (-kf * (s - min_sum) / 2.0).exp())
        .collect();
    let total: f64 = shifted.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        log::warn!("cosine row sums are not finite; falling back to uniform sampling");
        let mut d = SamplingDistribution::uniform(k);
        d.weights = weights;
        return d;
    }
    let probs = shifted.iter().map(|w| w / total).collect();
    SamplingDistribution::with_probs(weights, probs)
}

/// Inverse-CDF draw by bisection on the cumulative array.
pub fn sample_block<R: Rng + ?Sized>(dist: &SamplingDistribution, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let t = dist.cumulative.partition_point(|&c| c <= u);
    t.min(dist.len() - 1)
}

/// Uniform draw over `k` blocks.
pub fn sample_uniform<R: Rng + ?Sized>(k: usize, rng: &mut R) -> usize {
    rng.random_range(0..k)
}
