use serde::Serialize;

use crate::error::{check_len, Result};
use crate::linalg::MatrixHandle;

#[derive(Debug, Clone, Default, Serialize)]
pub struct SystemMeta {
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub density: f64,
    pub cond: Option<f64>,
    pub prob_cond: Option<f64>,
}

/// `A x = b`, optionally with a known reference solution.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub a: MatrixHandle,
    pub b: Vec<f64>,
    pub x_star: Option<Vec<f64>>,
    pub name: String,
    pub meta: SystemMeta,
}

impl LinearSystem {
    pub fn new(
        name: impl Into<String>,
        a: MatrixHandle,
        b: Vec<f64>,
        x_star: Option<Vec<f64>>,
    ) -> Result<Self> {
        check_len("right-hand side", a.rows(), b.len())?;
        if let Some(xs) = &x_star {
            check_len("reference solution", a.cols(), xs.len())?;
        }
        let meta = SystemMeta {
            rows: a.rows(),
            cols: a.cols(),
            nnz: a.nnz(),
            density: a.density(),
            cond: None,
            prob_cond: None,
        };
        Ok(Self {
            a,
            b,
            x_star,
            name: name.into(),
            meta,
        })
    }

    /// Consistent system `b = A x_star`.
    pub fn with_solution(
        name: impl Into<String>,
        a: MatrixHandle,
        x_star: Vec<f64>,
    ) -> Result<Self> {
        let b = a.matvec(&x_star)?;
        Self::new(name, a, b, Some(x_star))
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }
}
