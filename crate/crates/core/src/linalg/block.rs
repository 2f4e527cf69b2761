//! Row blocks and the regularized block projection kernel.
//!
//! A block update needs `A_τᵀ(A_τA_τᵀ + λI)⁻¹ r_τ`. The same vector can be
//! obtained as `(A_τᵀA_τ + λI)⁻¹A_τᵀ r_τ`, so the factorization is built on
//! whichever gram matrix is smaller: `s×s` when the block has fewer rows than
//! columns, `n×n` otherwise.

use std::ops::Range;

use serde::Serialize;

use crate::error::{check_len, Error, Result};

use super::handle::{MatrixHandle, RowView};

/// Relative scale of the regularization used when a caller asks for an
/// (unregularized) pseudo-inverse projection.
pub const PINV_JITTER: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    /// A contiguous range from the row partition.
    Fixed,
    /// An arbitrary index set, e.g. the rows with the largest residuals.
    Dynamic,
}

/// A subset of the rows of a matrix.
#[derive(Debug, Clone)]
pub struct RowBlock<'a> {
    matrix: &'a MatrixHandle,
    rows: Vec<usize>,
    kind: BlockKind,
}

impl<'a> RowBlock<'a> {
    pub fn fixed(matrix: &'a MatrixHandle, range: Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > matrix.rows() {
            return Err(Error::InvalidConfig(format!(
                "block range {range:?} invalid for {} rows",
                matrix.rows()
            )));
        }
        Ok(Self {
            matrix,
            rows: range.collect(),
            kind: BlockKind::Fixed,
        })
    }

    pub fn dynamic(matrix: &'a MatrixHandle, rows: Vec<usize>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidConfig("empty dynamic block".into()));
        }
        if let Some(&bad) = rows.iter().find(|&&i| i >= matrix.rows()) {
            return Err(Error::InvalidConfig(format!(
                "row index {bad} out of range for {} rows",
                matrix.rows()
            )));
        }
        Ok(Self {
            matrix,
            rows,
            kind: BlockKind::Dynamic,
        })
    }

    pub fn matrix(&self) -> &'a MatrixHandle {
        self.matrix
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    #[inline]
    pub fn row(&self, k: usize) -> RowView<'a> {
        self.matrix.row(self.rows[k])
    }

    /// `A_τ x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|&i| self.matrix.row(i).dot(x))
            .collect()
    }

    /// `b_τ - A_τ x`
    pub fn residual(&self, b: &[f64], x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|&i| b[i] - self.matrix.row(i).dot(x))
            .collect()
    }

    /// `A_τᵀ y`
    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        for (k, &yk) in y.iter().enumerate() {
            if yk != 0.0 {
                self.row(k).axpy_into(yk, &mut out);
            }
        }
        out
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.rows
            .iter()
            .map(|&i| self.matrix.row(i).norm_sq())
            .sum()
    }

    /// Regularization that stands in for an exact pseudo-inverse projection.
    pub fn pinv_jitter(&self) -> f64 {
        PINV_JITTER * self.frobenius_norm_sq()
    }

    /// Dense row-major copy of the block.
    pub fn to_dense_rows(&self) -> Vec<f64> {
        let n = self.cols();
        let mut out = vec![0.0; self.len() * n];
        for k in 0..self.len() {
            self.row(k).for_each(|j, v| out[k * n + j] = v);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GramSide {
    /// Factor of `A_τA_τᵀ + λI` (`s×s`).
    Row,
    /// Factor of `A_τᵀA_τ + λI` (`n×n`).
    Col,
}

impl GramSide {
    /// Row side only when the block is strictly wider than tall.
    pub fn for_shape(block_rows: usize, cols: usize) -> Self {
        if block_rows < cols {
            GramSide::Row
        } else {
            GramSide::Col
        }
    }
}

/// Cholesky factor of a regularized block gram matrix.
#[derive(Debug, Clone)]
pub struct BlockFactor {
    block_rows: usize,
    cols: usize,
    side: GramSide,
    dim: usize,
    /// Row-major lower triangle, `dim × dim`.
    lower: Vec<f64>,
    lambda: f64,
}

impl BlockFactor {
    pub fn side(&self) -> GramSide {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    /// `L Lᵀ`, row-major.
    pub fn reconstruct(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                let s: f64 = (0..=j)
                    .map(|k| self.lower[i * d + k] * self.lower[j * d + k])
                    .sum();
                out[i * d + j] = s;
                out[j * d + i] = s;
            }
        }
        out
    }
}

/// Regularized gram matrix of `block` on `side`, row-major.
pub fn regularized_gram(block: &RowBlock<'_>, side: GramSide, lambda: f64) -> Vec<f64> {
    let s = block.len();
    let n = block.cols();
    match side {
        GramSide::Row => {
            let mut g = vec![0.0; s * s];
            let mut work = vec![0.0; n];
            for i in 0..s {
                let ri = block.row(i);
                ri.for_each(|j, v| work[j] = v);
                for j in 0..=i {
                    let v = block.row(j).dot(&work);
                    g[i * s + j] = v;
                    g[j * s + i] = v;
                }
                ri.for_each(|j, _| work[j] = 0.0);
                g[i * s + i] += lambda;
            }
            g
        }
        GramSide::Col => {
            let mut g = vec![0.0; n * n];
            let mut entries: Vec<(usize, f64)> = Vec::new();
            for k in 0..s {
                entries.clear();
                block.row(k).for_each(|j, v| {
                    if v != 0.0 {
                        entries.push((j, v));
                    }
                });
                for (a, &(ja, va)) in entries.iter().enumerate() {
                    for &(jb, vb) in &entries[..=a] {
                        g[ja * n + jb] += va * vb;
                    }
                }
            }
            for i in 0..n {
                for j in 0..i {
                    g[j * n + i] = g[i * n + j];
                }
                g[i * n + i] += lambda;
            }
            g
        }
    }
}

/// In-place Cholesky of a row-major SPD matrix; returns the lower factor.
///
/// Without regularization, pivots below `dim·ε·max_diag` are treated as zero.
fn cholesky(mut a: Vec<f64>, d: usize, lambda: f64, block_rows: usize) -> Result<Vec<f64>> {
    let max_diag = (0..d).map(|i| a[i * d + i]).fold(0.0_f64, f64::max);
    let floor = if lambda > 0.0 {
        0.0
    } else {
        d as f64 * f64::EPSILON * max_diag
    };
    for j in 0..d {
        let mut pivot = a[j * d + j];
        for k in 0..j {
            pivot -= a[j * d + k] * a[j * d + k];
        }
        if pivot <= floor || !pivot.is_finite() {
            return Err(Error::RankDeficientBlock {
                rows: block_rows,
                column: j,
                pivot,
            });
        }
        let ljj = pivot.sqrt();
        a[j * d + j] = ljj;
        for i in (j + 1)..d {
            let mut v = a[i * d + j];
            for k in 0..j {
                v -= a[i * d + k] * a[j * d + k];
            }
            a[i * d + j] = v / ljj;
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            a[i * d + j] = 0.0;
        }
    }
    Ok(a)
}

/// Factors the regularized gram matrix of `block` on the smaller side.
pub fn factor_block(block: &RowBlock<'_>, lambda: f64) -> Result<BlockFactor> {
    factor_block_on(
        block,
        GramSide::for_shape(block.len(), block.cols()),
        lambda,
    )
}

/// Factors the regularized gram matrix of `block` on a given side. Both
/// sides yield the same update direction when `λ > 0`.
pub fn factor_block_on(block: &RowBlock<'_>, side: GramSide, lambda: f64) -> Result<BlockFactor> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    let s = block.len();
    let n = block.cols();
    let dim = match side {
        GramSide::Row => s,
        GramSide::Col => n,
    };
    let gram = regularized_gram(block, side, lambda);
    let lower = cholesky(gram, dim, lambda, s)?;
    Ok(BlockFactor {
        block_rows: s,
        cols: n,
        side,
        dim,
        lower,
        lambda,
    })
}

/// Solves `(G + λI) x = rhs` with the stored factor.
pub fn spd_solve(factor: &BlockFactor, rhs: &[f64]) -> Result<Vec<f64>> {
    let d = factor.dim;
    check_len("spd_solve rhs", d, rhs.len())?;
    let l = &factor.lower;
    let mut y = rhs.to_vec();
    for i in 0..d {
        let mut v = y[i];
        for k in 0..i {
            v -= l[i * d + k] * y[k];
        }
        y[i] = v / l[i * d + i];
    }
    for i in (0..d).rev() {
        let mut v = y[i];
        for k in (i + 1)..d {
            v -= l[k * d + i] * y[k];
        }
        y[i] = v / l[i * d + i];
    }
    Ok(y)
}

/// Returns the update direction `A_τᵀ(A_τA_τᵀ + λI)⁻¹ r_τ` for the block
/// residual `resid_sub`, evaluated on the factor's side.
pub fn regularized_apply(
    factor: &BlockFactor,
    block: &RowBlock<'_>,
    resid_sub: &[f64],
) -> Result<Vec<f64>> {
    check_len(
        "regularized_apply block rows",
        factor.block_rows,
        block.len(),
    )?;
    check_len("regularized_apply block cols", factor.cols, block.cols())?;
    check_len("regularized_apply residual", block.len(), resid_sub.len())?;
    match factor.side {
        GramSide::Row => {
            let w = spd_solve(factor, resid_sub)?;
            Ok(block.apply_transpose(&w))
        }
        GramSide::Col => {
            let t = block.apply_transpose(resid_sub);
            spd_solve(factor, &t)
        }
    }
}
