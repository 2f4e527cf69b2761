use std::time::{Duration, Instant};

use crate::blocking::{
    build_sampling_distribution, compute_centroids, compute_cosine_matrix, partition_rows,
    BlockPartition, CosineMatrix, SamplingDistribution,
};
use crate::error::Result;
use crate::linalg::vector::axpy;
use crate::linalg::{factor_block, regularized_apply, BlockFactor, MatrixHandle, RowBlock};

/// How the regularization of a fixed block is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaPolicy {
    Fixed(f64),
    /// `PINV_JITTER · ‖A_τ‖²_F`, a stand-in for the exact pseudo-inverse.
    PinvJitter,
}

/// Partition, sampling distribution and lazily built block factors for one
/// matrix. Independent of the right-hand side, so it can be reused across
/// solves (e.g. by the inner iterations of flexible GMRES).
#[derive(Debug)]
pub struct BlockSetup<'a> {
    a: &'a MatrixHandle,
    partition: BlockPartition,
    cosine: CosineMatrix,
    dist: SamplingDistribution,
    policy: LambdaPolicy,
    factors: Vec<Option<BlockFactor>>,
    build_time: Duration,
    factor_time: Duration,
}

impl<'a> BlockSetup<'a> {
    pub fn new(a: &'a MatrixHandle, block_rows: usize, policy: LambdaPolicy) -> Result<Self> {
        let start = Instant::now();
        let partition = partition_rows(a.rows(), block_rows)?;
        let centroids = compute_centroids(a, &partition)?;
        let cosine = compute_cosine_matrix(&centroids);
        let dist = build_sampling_distribution(&cosine);
        let k = partition.num_blocks();
        Ok(Self {
            a,
            partition,
            cosine,
            dist,
            policy,
            factors: vec![None; k],
            build_time: start.elapsed(),
            factor_time: Duration::ZERO,
        })
    }

    pub fn matrix(&self) -> &'a MatrixHandle {
        self.a
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn cosine(&self) -> &CosineMatrix {
        &self.cosine
    }

    pub fn distribution(&self) -> &SamplingDistribution {
        &self.dist
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    pub fn block(&self, t: usize) -> RowBlock<'a> {
        RowBlock::fixed(self.a, self.partition.range(t)).expect("partition ranges are valid")
    }

    /// Time spent building the partition and distribution plus every
    /// factorization so far.
    pub fn setup_time(&self) -> Duration {
        self.build_time + self.factor_time
    }

    pub fn factor_time(&self) -> Duration {
        self.factor_time
    }

    /// Factor of block `t`, computed on first use and memoized.
    pub fn factor(&mut self, t: usize) -> Result<&BlockFactor> {
        if self.factors[t].is_none() {
            let start = Instant::now();
            let block = self.block(t);
            let lambda = match self.policy {
                LambdaPolicy::Fixed(l) => l,
                LambdaPolicy::PinvJitter => block.pinv_jitter(),
            };
            let f = factor_block(&block, lambda)?;
            self.factor_time += start.elapsed();
            self.factors[t] = Some(f);
        }
        Ok(self.factors[t].as_ref().unwrap())
    }

    /// `x ← x + A_τᵀ(A_τA_τᵀ + λI)⁻¹(b_τ − A_τ x)` for fixed block `t`.
    pub fn fixed_update(&mut self, t: usize, b: &[f64], x: &mut [f64]) -> Result<()> {
        let block = self.block(t);
        let resid = block.residual(b, x);
        let factor = self.factor(t)?;
        let delta = regularized_apply(factor, &block, &resid)?;
        axpy(1.0, &delta, x);
        Ok(())
    }
}
