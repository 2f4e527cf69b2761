//! Flexible Arnoldi process.

use crate::error::{check_len, Result};
use crate::linalg::vector::{axpy, dot, norm2};
use crate::linalg::MatrixHandle;

/// A second Gram–Schmidt pass runs when orthogonalization shrinks `w` below
/// this fraction of `‖A z‖`.
pub const REORTH_DROP: f64 = 0.7;

/// `h_{k+1,k} < BREAKDOWN_TOL · ‖A z_k‖` ends the process.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// Upper Hessenberg `H̃_k` stored by columns; column `j` holds rows
/// `0..=j+1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Hessenberg {
    cols: Vec<Vec<f64>>,
}

impl Hessenberg {
    pub fn push_column(&mut self, col: Vec<f64>) {
        assert_eq!(col.len(), self.cols.len() + 2, "not a Hessenberg column");
        self.cols.push(col);
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.cols
    }

    /// Number of columns `k`; the matrix is `(k+1)×k`.
    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    /// Entry `(i, j)`, zero below the first subdiagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cols[j].get(i).copied().unwrap_or(0.0)
    }
}

/// Basis vectors `v_1..v_{k+1}`, preconditioned directions `z_1..z_k`, the
/// Hessenberg matrix and `β = ‖r₀‖`.
#[derive(Debug, Clone)]
pub struct KrylovState {
    pub v: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
    pub h: Hessenberg,
    pub beta: f64,
}

impl KrylovState {
    /// Starts from the initial residual `r₀ ≠ 0`.
    pub fn new(r0: &[f64]) -> Self {
        let beta = norm2(r0);
        let v1 = r0.iter().map(|r| r / beta).collect();
        Self {
            v: vec![v1],
            z: Vec::new(),
            h: Hessenberg::default(),
            beta,
        }
    }

    /// Number of completed Arnoldi steps.
    pub fn steps(&self) -> usize {
        self.z.len()
    }

    /// The basis vector the next step preconditions.
    pub fn last_basis(&self) -> &[f64] {
        self.v.last().expect("basis is never empty")
    }

    /// `x0 + Σ y_j z_j`
    pub fn combine(&self, x0: &[f64], y: &[f64]) -> Vec<f64> {
        let mut x = x0.to_vec();
        for (zj, yj) in self.z.iter().zip(y) {
            axpy(*yj, zj, &mut x);
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArnoldiOutcome {
    /// A new basis vector was appended.
    Extended,
    /// `w` vanished after orthogonalization: the solution lies in the
    /// current subspace. The Hessenberg column was still appended.
    HappyBreakdown,
    /// `A z = 0`; nothing was appended.
    ZeroDirection,
}

/// One flexible Arnoldi step with modified Gram–Schmidt:
/// `w = A z`, `h_{i,k} = v_iᵀ w`, `w ← w − h_{i,k} v_i`, `h_{k+1,k} = ‖w‖`.
pub fn arnoldi_step(
    state: &mut KrylovState,
    a: &MatrixHandle,
    z: Vec<f64>,
) -> Result<ArnoldiOutcome> {
    check_len("preconditioned vector", a.cols(), z.len())?;
    let k = state.v.len();
    let mut w = a.matvec(&z)?;
    let norm_az = norm2(&w);
    if norm_az == 0.0 {
        return Ok(ArnoldiOutcome::ZeroDirection);
    }
    let mut h = vec![0.0; k + 1];
    for (hi, vi) in h.iter_mut().zip(&state.v) {
        *hi = dot(vi, &w);
        axpy(-*hi, vi, &mut w);
    }
    let mut norm_w = norm2(&w);
    if norm_w < REORTH_DROP * norm_az {
        for (hi, vi) in h.iter_mut().zip(&state.v) {
            let c = dot(vi, &w);
            *hi += c;
            axpy(-c, vi, &mut w);
        }
        norm_w = norm2(&w);
    }
    h[k] = norm_w;
    state.z.push(z);
    state.h.push_column(h);
    if norm_w < BREAKDOWN_TOL * norm_az {
        return Ok(ArnoldiOutcome::HappyBreakdown);
    }
    w.iter_mut().for_each(|x| *x /= norm_w);
    state.v.push(w);
    Ok(ArnoldiOutcome::Extended)
}
