use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

use super::dense::DenseMatrix;

/// Compressed sparse row matrix.
///
/// Column indices inside a row are strictly increasing, which also rules out
/// duplicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != rows + 1 {
            return Err(Error::InvalidMatrix(format!(
                "row_offsets has {} entries, expected {}",
                row_offsets.len(),
                rows + 1
            )));
        }
        if row_offsets[0] != 0 || *row_offsets.last().unwrap() != values.len() {
            return Err(Error::InvalidMatrix(
                "row_offsets must start at 0 and end at nnz".into(),
            ));
        }
        if col_indices.len() != values.len() {
            return Err(Error::InvalidMatrix(
                "col_indices and values differ in length".into(),
            ));
        }
        for i in 0..rows {
            let (start, end) = (row_offsets[i], row_offsets[i + 1]);
            if start > end {
                return Err(Error::InvalidMatrix(format!(
                    "row_offsets decreases at row {i}"
                )));
            }
            let row_cols = &col_indices[start..end];
            for (k, &c) in row_cols.iter().enumerate() {
                if c >= cols {
                    return Err(Error::InvalidMatrix(format!(
                        "column index {c} out of range in row {i}"
                    )));
                }
                if k > 0 && row_cols[k - 1] >= c {
                    return Err(Error::InvalidMatrix(format!(
                        "row {i} has unsorted or duplicate column {c}"
                    )));
                }
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite value".into()));
        }
        Ok(Self {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Assembles a CSR matrix from `(row, col, value)` triplets. Duplicate
    /// coordinates are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(i, j, _) in &sorted {
            if i >= rows || j >= cols {
                return Err(Error::InvalidMatrix(format!(
                    "triplet ({i}, {j}) outside {rows}x{cols}"
                )));
            }
        }
        sorted.sort_by_key(|&(i, j, _)| (i, j));

        let mut row_offsets = vec![0usize; rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            col_indices.push(j);
            values.push(v);
            row_offsets[i + 1] += 1;
            last = Some((i, j));
        }
        for i in 0..rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self::new(rows, cols, row_offsets, col_indices, values)
    }

    pub fn from_dense(dense: &DenseMatrix) -> Self {
        let mut triplets = Vec::new();
        for i in 0..dense.rows() {
            for (j, &v) in dense.row(i).iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(dense.rows(), dense.cols(), &triplets)
            .expect("dense matrix entries are valid triplets")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[s..e], &self.values[s..e])
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("matvec input", self.cols, x.len())?;
        Ok((0..self.rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, v)| v * x[j]).sum()
            })
            .collect())
    }

    pub fn matvec_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("matvec_transpose input", self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&j, v) in cols.iter().zip(vals) {
                out[j] += v * yi;
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                data[i * self.cols + j] = v;
            }
        }
        DenseMatrix::new(self.rows, self.cols, data).expect("finite by construction")
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}
