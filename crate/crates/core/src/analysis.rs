//! Dense reference computations for checking solver behavior at small scale.
//!
//! Nothing here is used by the solvers themselves. Everything is dense and
//! goes through an SVD or eigensolve, so sizes are capped.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::blocking::sample_block;
use crate::blocking::{BlockPartition, SamplingDistribution};
use crate::error::{check_len, Error, Result};
use crate::linalg::vector::{axpy, dot, norm2, sub};
use crate::linalg::{factor_block, regularized_apply, BlockFactor, MatrixHandle, RowBlock};
use crate::rng::{derive_seed, seeded};

/// Size limit of the weighted least-squares oracle.
pub const WEIGHTED_LS_LIMIT: usize = 200;
/// Size limit (on `min(m, n)`) of SVD-based quantities.
pub const SVD_LIMIT: usize = 2000;

pub fn to_dmatrix(a: &MatrixHandle) -> DMatrix<f64> {
    let d = a.to_dense();
    DMatrix::from_row_slice(d.rows(), d.cols(), d.data())
}

fn guard(a: &MatrixHandle, limit: usize, both: bool) -> Result<()> {
    let (m, n) = (a.rows(), a.cols());
    let too_large = if both {
        m.max(n) > limit
    } else {
        m.min(n) > limit
    };
    if too_large {
        return Err(Error::TooLarge {
            rows: m,
            cols: n,
            limit,
        });
    }
    Ok(())
}

/// Singular values at or below this are treated as zero.
fn rank_tol(sigma: &DVector<f64>, m: usize, n: usize) -> f64 {
    m.max(n) as f64 * f64::EPSILON * sigma.max()
}

/// Smallest singular value above the rank tolerance, if any.
fn min_positive(sigma: &DVector<f64>, tol: f64) -> Option<f64> {
    sigma.iter().copied().filter(|&s| s > tol).reduce(f64::min)
}

fn pinv(m: DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let svd = m.svd(true, true);
    let tol = rank_tol(&svd.singular_values, r, c);
    svd.pseudo_inverse(tol).expect("both factors were computed")
}

/// Orthonormal basis of `range(Aᵀ)` as columns (`n × rank`).
pub fn row_space_basis(a: &MatrixHandle) -> Result<DMatrix<f64>> {
    guard(a, SVD_LIMIT, false)?;
    let (m, n) = (a.rows(), a.cols());
    let svd = to_dmatrix(a).svd(false, true);
    let tol = rank_tol(&svd.singular_values, m, n);
    let v_t = svd.v_t.expect("V was requested");
    let rows: Vec<_> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .map(|i| v_t.row(i).transpose())
        .collect();
    if rows.is_empty() {
        return Ok(DMatrix::zeros(n, 0));
    }
    Ok(DMatrix::from_columns(&rows))
}

/// `‖x − Π x‖` where `Π` projects onto `range(Aᵀ)`: the size of the
/// component of `x` in `null(A)`.
pub fn null_space_norm(a: &MatrixHandle, x: &[f64]) -> Result<f64> {
    check_len("vector", a.cols(), x.len())?;
    let basis = row_space_basis(a)?;
    Ok(null_space_norm_with(&basis, x))
}

/// As [`null_space_norm`] with a precomputed [`row_space_basis`].
pub fn null_space_norm_with(basis: &DMatrix<f64>, x: &[f64]) -> f64 {
    let xv = DVector::from_column_slice(x);
    let proj = basis * (basis.transpose() * &xv);
    (xv - proj).norm()
}

/// `A† b` via a dense SVD.
pub fn min_norm_solution(a: &MatrixHandle, b: &[f64]) -> Result<Vec<f64>> {
    guard(a, SVD_LIMIT, false)?;
    check_len("right-hand side", a.rows(), b.len())?;
    let x = pinv(to_dmatrix(a)) * DVector::from_column_slice(b);
    Ok(x.as_slice().to_vec())
}

/// `σ_max / σ⁺_min`
pub fn condition_number(a: &MatrixHandle) -> Result<f64> {
    guard(a, SVD_LIMIT, false)?;
    let sigma = to_dmatrix(a).singular_values();
    let tol = rank_tol(&sigma, a.rows(), a.cols());
    let min = min_positive(&sigma, tol).ok_or(Error::ZeroBlock)?;
    Ok(sigma.max() / min)
}

/// `‖A†‖ ‖b‖ / ‖x_star‖ = ‖b‖ / (σ⁺_min ‖x_star‖)`.
pub fn problem_condition(a: &MatrixHandle, b: &[f64], x_star: &[f64]) -> Result<f64> {
    guard(a, SVD_LIMIT, false)?;
    check_len("right-hand side", a.rows(), b.len())?;
    check_len("reference solution", a.cols(), x_star.len())?;
    let nx = norm2(x_star);
    if nx == 0.0 {
        return Err(Error::ZeroNorm { metric: "x_star" });
    }
    let sigma = to_dmatrix(a).singular_values();
    let tol = rank_tol(&sigma, a.rows(), a.cols());
    let min = min_positive(&sigma, tol).ok_or(Error::ZeroBlock)?;
    Ok(norm2(b) / (min * nx))
}

/// Error contraction factor `λ / (λ⁺_min(A_τᵀA_τ) + λ)` of one regularized
/// update, valid for errors in `range(A_τᵀ)`.
pub fn contraction_bound(block: &RowBlock<'_>, lambda: f64) -> Result<f64> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "lambda must be >= 0, got {lambda}"
        )));
    }
    let (s, n) = (block.len(), block.cols());
    let sigma = DMatrix::from_row_slice(s, n, &block.to_dense_rows()).singular_values();
    if sigma.max() == 0.0 {
        return Err(Error::ZeroBlock);
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let tol = rank_tol(&sigma, s, n);
    let smin = min_positive(&sigma, tol).expect("nonzero block has a positive singular value");
    let eig = smin * smin;
    Ok(lambda / (eig + lambda))
}

/// Which rows were summed by [`initial_solution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowSet {
    All,
    FirstHalf,
    FirstRow,
    /// Every candidate was degenerate; `x0 = 0`.
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct InitialSolution {
    pub x0: Vec<f64>,
    /// Sum of the selected rows of `A`.
    pub y: Vec<f64>,
    /// `A y`
    pub b_tilde: Vec<f64>,
    /// `<b, b̃> / ‖b̃‖²`
    pub coefficient: f64,
    pub rows: RowSet,
}

/// A cheap starting point in `range(Aᵀ)` with `‖b − A x0‖ ≤ ‖b‖`.
///
/// `y` is a sum of rows of `A` and `x0 = (<b, b̃>/‖b̃‖²) y` with `b̃ = A y`,
/// the multiple of `y` that minimizes the residual. All rows are tried
/// first, then the first `⌈m/2⌉`, then the first row alone; if each gives
/// `b̃ = 0` or `<b, b̃> = 0` the result is `x0 = 0`.
pub fn initial_solution(a: &MatrixHandle, b: &[f64]) -> Result<InitialSolution> {
    check_len("right-hand side", a.rows(), b.len())?;
    let m = a.rows();
    let n = a.cols();
    let candidates = [
        (RowSet::All, m),
        (RowSet::FirstHalf, m.div_ceil(2)),
        (RowSet::FirstRow, 1),
    ];
    let mut last_len = None;
    for (set, len) in candidates {
        if last_len == Some(len) {
            continue;
        }
        last_len = Some(len);
        let mut y = vec![0.0; n];
        for i in 0..len {
            a.row(i).axpy_into(1.0, &mut y);
        }
        let b_tilde = a.matvec(&y)?;
        let bt2 = dot(&b_tilde, &b_tilde);
        let inner = dot(b, &b_tilde);
        if bt2 == 0.0 || inner == 0.0 {
            continue;
        }
        let coefficient = inner / bt2;
        let x0 = y.iter().map(|v| coefficient * v).collect();
        return Ok(InitialSolution {
            x0,
            y,
            b_tilde,
            coefficient,
            rows: set,
        });
    }
    Ok(InitialSolution {
        x0: vec![0.0; n],
        y: vec![0.0; n],
        b_tilde: vec![0.0; m],
        coefficient: 0.0,
        rows: RowSet::None,
    })
}

/// Expected update operators of fixed-distribution block sampling and the
/// weighted least-squares point they converge to.
#[derive(Debug, Clone)]
pub struct WeightedLsReference {
    /// `Σ_t p_t I_tᵀ (A_t A_tᵀ + λI)⁻¹ I_t`, `m×m`.
    pub w_bar: DMatrix<f64>,
    /// `Σ_t p_t A_tᵀ (A_t A_tᵀ + λI)⁻¹ A_t = Aᵀ W̄ A`, `n×n`.
    pub p_bar: DMatrix<f64>,
    /// `argmin ‖A x − b‖_W̄` within `range(Aᵀ)`.
    pub x_mu: Vec<f64>,
    pub r_mu: Vec<f64>,
    /// Smallest nonzero singular value of `P̄`.
    pub alpha: f64,
}

pub fn weighted_ls_reference(
    a: &MatrixHandle,
    b: &[f64],
    part: &BlockPartition,
    probs: &[f64],
    lambda: f64,
) -> Result<WeightedLsReference> {
    guard(a, WEIGHTED_LS_LIMIT, true)?;
    check_len("right-hand side", a.rows(), b.len())?;
    check_len("block probabilities", part.num_blocks(), probs.len())?;
    check_len("partition rows", a.rows(), part.total_rows())?;
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "lambda must be >= 0, got {lambda}"
        )));
    }
    let (m, n) = (a.rows(), a.cols());
    let ad = to_dmatrix(a);
    let mut w_bar = DMatrix::<f64>::zeros(m, m);
    for (range, &p) in part.ranges().iter().zip(probs) {
        let s = range.len();
        let block = ad.rows(range.start, s);
        let gram = block * block.transpose() + DMatrix::identity(s, s) * lambda;
        let inv = pinv(gram);
        let mut view = w_bar.view_mut((range.start, range.start), (s, s));
        view += inv * p;
    }
    let p_bar = ad.transpose() * &w_bar * &ad;
    let rhs = ad.transpose() * &w_bar * DVector::from_column_slice(b);
    let x_mu = pinv(p_bar.clone()) * rhs;
    let r_mu = DVector::from_column_slice(b) - &ad * &x_mu;

    let sigma = p_bar.singular_values();
    let tol = rank_tol(&sigma, n, n);
    let alpha = min_positive(&sigma, tol).unwrap_or(0.0);
    Ok(WeightedLsReference {
        w_bar,
        p_bar,
        x_mu: x_mu.as_slice().to_vec(),
        r_mu: r_mu.as_slice().to_vec(),
        alpha,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanConvergenceReport {
    /// `‖mean(x_T) − x_μ‖`
    pub deviation: f64,
    /// `(1 − α)^T ‖x0 − x_μ‖`
    pub bound: f64,
    /// Monte Carlo standard error of the mean iterate, `sqrt(Σ_i var_i / trials)`.
    pub standard_error: f64,
    pub alpha: f64,
    pub trials: usize,
    pub steps: usize,
}

impl MeanConvergenceReport {
    /// `deviation ≤ bound + z · standard_error`
    pub fn within(&self, z: f64) -> bool {
        self.deviation <= self.bound + z * self.standard_error
    }
}

/// Runs `trials` independent chains of `steps` regularized block updates
/// with blocks drawn from `probs` (no residual step) and compares the mean
/// final iterate with `x_μ`.
#[allow(clippy::too_many_arguments)]
pub fn check_mean_convergence(
    a: &MatrixHandle,
    b: &[f64],
    part: &BlockPartition,
    probs: &[f64],
    lambda: f64,
    x0: &[f64],
    trials: usize,
    steps: usize,
    seed: u64,
) -> Result<MeanConvergenceReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    check_len("initial iterate", a.cols(), x0.len())?;
    let reference = weighted_ls_reference(a, b, part, probs, lambda)?;
    let dist = SamplingDistribution::from_weights(probs.to_vec())?;
    let blocks: Vec<RowBlock<'_>> = part
        .ranges()
        .iter()
        .map(|r| RowBlock::fixed(a, r.clone()))
        .collect::<Result<_>>()?;
    let factors: Vec<BlockFactor> = blocks
        .iter()
        .map(|blk| {
            let l = if lambda > 0.0 {
                lambda
            } else {
                blk.pinv_jitter()
            };
            factor_block(blk, l)
        })
        .collect::<Result<_>>()?;

    let n = a.cols();
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    for trial in 0..trials {
        let mut rng = seeded(derive_seed(seed, trial as u64));
        let mut x = x0.to_vec();
        for _ in 0..steps {
            let t = sample_block(&dist, &mut rng);
            let resid = blocks[t].residual(b, &x);
            let delta = regularized_apply(&factors[t], &blocks[t], &resid)?;
            axpy(1.0, &delta, &mut x);
        }
        for j in 0..n {
            sum[j] += x[j];
            sum_sq[j] += x[j] * x[j];
        }
    }
    let tf = trials as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / tf).collect();
    let var_total: f64 = if trials > 1 {
        (0..n)
            .map(|j| ((sum_sq[j] - tf * mean[j] * mean[j]) / (tf - 1.0)).max(0.0))
            .sum()
    } else {
        0.0
    };
    let deviation = norm2(&sub(&mean, &reference.x_mu));
    let initial = norm2(&sub(x0, &reference.x_mu));
    let bound = (1.0 - reference.alpha).max(0.0).powi(steps as i32) * initial;
    Ok(MeanConvergenceReport {
        deviation,
        bound,
        standard_error: (var_total / tf).sqrt(),
        alpha: reference.alpha,
        trials,
        steps,
    })
}
