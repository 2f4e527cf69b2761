use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::dense::DenseMatrix;
use super::sparse::SparseMatrix;

/// A system matrix in either storage format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MatrixHandle {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
}

/// Borrowed view of one matrix row.
#[derive(Debug, Clone, Copy)]
pub enum RowView<'a> {
    Dense(&'a [f64]),
    Sparse { cols: &'a [usize], vals: &'a [f64] },
}

impl RowView<'_> {
    #[inline]
    pub fn dot(&self, x: &[f64]) -> f64 {
        match self {
            RowView::Dense(row) => super::vector::dot(row, x),
            RowView::Sparse { cols, vals } => cols.iter().zip(*vals).map(|(&j, v)| v * x[j]).sum(),
        }
    }

    /// `y += alpha * row`
    #[inline]
    pub fn axpy_into(&self, alpha: f64, y: &mut [f64]) {
        match self {
            RowView::Dense(row) => super::vector::axpy(alpha, row, y),
            RowView::Sparse { cols, vals } => {
                for (&j, v) in cols.iter().zip(*vals) {
                    y[j] += alpha * v;
                }
            }
        }
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            RowView::Dense(row) => row.iter().map(|v| v * v).sum(),
            RowView::Sparse { vals, .. } => vals.iter().map(|v| v * v).sum(),
        }
    }

    /// Calls `f(col, value)` for each stored entry.
    #[inline]
    pub fn for_each(&self, mut f: impl FnMut(usize, f64)) {
        match self {
            RowView::Dense(row) => row.iter().enumerate().for_each(|(j, &v)| f(j, v)),
            RowView::Sparse { cols, vals } => cols.iter().zip(*vals).for_each(|(&j, &v)| f(j, v)),
        }
    }
}

impl MatrixHandle {
    pub fn rows(&self) -> usize {
        match self {
            MatrixHandle::Dense(m) => m.rows(),
            MatrixHandle::Sparse(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            MatrixHandle::Dense(m) => m.cols(),
            MatrixHandle::Sparse(m) => m.cols(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            MatrixHandle::Dense(m) => m.nnz(),
            MatrixHandle::Sparse(m) => m.nnz(),
        }
    }

    pub fn density(&self) -> f64 {
        let total = self.rows() * self.cols();
        if total == 0 {
            0.0
        } else {
            self.nnz() as f64 / total as f64
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> RowView<'_> {
        match self {
            MatrixHandle::Dense(m) => RowView::Dense(m.row(i)),
            MatrixHandle::Sparse(m) => {
                let (cols, vals) = m.row(i);
                RowView::Sparse { cols, vals }
            }
        }
    }

    /// Returns `A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            MatrixHandle::Dense(m) => m.matvec(x),
            MatrixHandle::Sparse(m) => m.matvec(x),
        }
    }

    /// Returns `Aᵀ y`.
    pub fn matvec_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            MatrixHandle::Dense(m) => m.matvec_transpose(y),
            MatrixHandle::Sparse(m) => m.matvec_transpose(y),
        }
    }

    /// Returns `b - A x`.
    pub fn residual(&self, b: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        crate::error::check_len("residual rhs", self.rows(), b.len())?;
        let mut r = self.matvec(x)?;
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        Ok(r)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            MatrixHandle::Dense(m) => m.clone(),
            MatrixHandle::Sparse(m) => m.to_dense(),
        }
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        match self {
            MatrixHandle::Dense(m) => m.frobenius_norm_sq(),
            MatrixHandle::Sparse(m) => m.frobenius_norm_sq(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, MatrixHandle::Sparse(_))
    }
}

impl From<DenseMatrix> for MatrixHandle {
    fn from(m: DenseMatrix) -> Self {
        MatrixHandle::Dense(m)
    }
}

impl From<SparseMatrix> for MatrixHandle {
    fn from(m: SparseMatrix) -> Self {
        MatrixHandle::Sparse(m)
    }
}

/// Free-function form of [`MatrixHandle::matvec`].
pub fn matvec(a: &MatrixHandle, x: &[f64]) -> Result<Vec<f64>> {
    a.matvec(x)
}

/// Free-function form of [`MatrixHandle::matvec_transpose`].
pub fn matvec_transpose(a: &MatrixHandle, y: &[f64]) -> Result<Vec<f64>> {
    a.matvec_transpose(y)
}
