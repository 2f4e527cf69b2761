//! Block Kaczmarz solvers: ROR-BK and the two baselines it is compared with.
//!
//! Every solver follows the same outer loop. One outer iteration applies the
//! solver's block updates, refreshes `r = b - A x`, records the relative
//! residual norm and stops once it drops below `tol_rrn`. ROR-BK then uses
//! that residual for its dynamic block, so the convergence check costs no
//! extra product with `A`.

mod driver;
mod ror_bk;
mod selection;
mod setup;
mod sobk;
mod ta_reblock;

use serde::{Deserialize, Serialize};

pub use driver::SolverState;
pub use ror_bk::{ror_bk_solve, RorBk};
pub use selection::{select_residual_block, DynamicBlockSelection};
pub use setup::{BlockSetup, LambdaPolicy};
pub use sobk::{sobk_solve, Sobk};
pub use ta_reblock::{ta_reblock_u_solve, tail_average, TaReblockU};

use crate::error::{check_len, Error, Result};
use crate::linalg::vector::{norm2, sub};
use crate::linalg::MatrixHandle;
use crate::system::LinearSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    RorBk,
    /// SOBK-style baseline: uniform block, its most orthogonal partner, then
    /// the first block again.
    Sobk,
    TaReblockU,
    FabGmres,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::RorBk => "ror-bk",
            SolverKind::Sobk => "sobk",
            SolverKind::TaReblockU => "ta-reblock-u",
            SolverKind::FabGmres => "fab-gmres",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SolverKind::RorBk => "ROR-BK",
            SolverKind::Sobk => "SOBK-style",
            SolverKind::TaReblockU => "TA-ReBlocK-U",
            SolverKind::FabGmres => "FAB-GMRES",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ror-bk" => Ok(SolverKind::RorBk),
            "sobk" => Ok(SolverKind::Sobk),
            "ta-reblock-u" => Ok(SolverKind::TaReblockU),
            "fab-gmres" => Ok(SolverKind::FabGmres),
            other => Err(Error::InvalidConfig(format!("unknown solver `{other}`"))),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Nominal rows per block, clamped to the row count of the system.
    pub block_rows: usize,
    /// `λ = lambda_coef · block_rows`.
    pub lambda_coef: f64,
    /// Orthogonality-sampled updates per outer iteration (ROR-BK only).
    pub orth_updates: usize,
    pub tol_rrn: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Number of trailing iterates averaged by TA-ReBlocK-U.
    pub tail_window: usize,
    /// Keep a copy of the iterate after every outer iteration.
    pub record_iterates: bool,
    /// Wall-clock budget for the solve loop.
    pub time_limit_s: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            block_rows: 100,
            lambda_coef: 1e-6,
            orth_updates: 3,
            tol_rrn: 1e-6,
            max_iters: 100_000,
            seed: 42,
            tail_window: 300,
            record_iterates: false,
            time_limit_s: None,
        }
    }
}

impl SolverConfig {
    /// Defaults for the tail-averaged baseline (`λ = 1e-3 · s`).
    pub fn ta_reblock() -> Self {
        Self {
            lambda_coef: 1e-3,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_rows == 0 {
            return Err(Error::InvalidConfig("block_rows must be >= 1".into()));
        }
        if !(self.lambda_coef.is_finite() && self.lambda_coef >= 0.0) {
            return Err(Error::InvalidConfig("lambda_coef must be >= 0".into()));
        }
        if self.tol_rrn.is_nan() || self.tol_rrn <= 0.0 {
            return Err(Error::InvalidConfig("tol_rrn must be > 0".into()));
        }
        if self.tail_window == 0 {
            return Err(Error::InvalidConfig("tail_window must be >= 1".into()));
        }
        Ok(())
    }

    pub fn effective_block_rows(&self, m: usize) -> usize {
        self.block_rows.min(m).max(1)
    }

    pub fn lambda_for(&self, block_rows: usize) -> f64 {
        self.lambda_coef * block_rows as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverReport {
    pub solver: SolverKind,
    /// Outer iterations performed.
    pub iterations: usize,
    pub block_updates: usize,
    /// Solve-loop time, excluding factorizations.
    pub wall_time_s: f64,
    /// Partition, cosine matrix, distribution and block factorizations.
    pub setup_time_s: f64,
    /// RRN before the first iteration followed by one entry per iteration.
    pub rrn_history: Vec<f64>,
    /// RRN of the last checked iterate; `converged ⟺ final_rrn < tol_rrn`.
    pub final_rrn: f64,
    /// RRN of the returned vector. Differs from `final_rrn` only when the
    /// solver post-processes its iterates (tail averaging).
    pub output_rrn: f64,
    pub final_re: Option<f64>,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub iterates: Vec<Vec<f64>>,
}

impl SolverReport {
    pub fn total_time_s(&self) -> f64 {
        self.wall_time_s + self.setup_time_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub rrn: f64,
    pub re: Option<f64>,
}

/// `‖b - A x‖ / ‖b‖`
pub fn relative_residual(a: &MatrixHandle, b: &[f64], x: &[f64]) -> Result<f64> {
    let nb = norm2(b);
    if nb == 0.0 {
        return Err(Error::ZeroNorm { metric: "RRN" });
    }
    Ok(norm2(&a.residual(b, x)?) / nb)
}

/// `‖x - x_star‖ / ‖x_star‖`
pub fn relative_error(x: &[f64], x_star: &[f64]) -> Result<f64> {
    check_len("relative error", x_star.len(), x.len())?;
    let nx = norm2(x_star);
    if nx == 0.0 {
        return Err(Error::ZeroNorm { metric: "RE" });
    }
    Ok(norm2(&sub(x, x_star)) / nx)
}

pub fn compute_metrics(sys: &LinearSystem, x: &[f64], x_star: Option<&[f64]>) -> Result<Metrics> {
    let rrn = relative_residual(&sys.a, &sys.b, x)?;
    let re = x_star.map(|xs| relative_error(x, xs)).transpose()?;
    Ok(Metrics { rrn, re })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    fn id2_system(b: Vec<f64>) -> LinearSystem {
        LinearSystem::new("id", DenseMatrix::identity(2).into(), b, None).unwrap()
    }

    #[test]
    fn metric_examples() {
        let sys = id2_system(vec![3.0, 4.0]);
        let m = compute_metrics(&sys, &[0.0, 0.0], None).unwrap();
        assert_eq!(m.rrn, 1.0);
        assert_eq!(m.re, None);

        let m = compute_metrics(&sys, &[3.0, 0.0], None).unwrap();
        assert!((m.rrn - 0.8).abs() < 1e-15);

        let m = compute_metrics(&sys, &[3.0, 4.0], Some(&[3.0, 4.0])).unwrap();
        assert_eq!(m.rrn, 0.0);
        assert_eq!(m.re, Some(0.0));
    }

    #[test]
    fn zero_denominators_are_named() {
        let sys = id2_system(vec![0.0, 0.0]);
        match compute_metrics(&sys, &[0.0, 0.0], None) {
            Err(Error::ZeroNorm { metric }) => assert_eq!(metric, "RRN"),
            other => panic!("unexpected {other:?}"),
        }
        match relative_error(&[1.0], &[0.0]) {
            Err(Error::ZeroNorm { metric }) => assert_eq!(metric, "RE"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            tol_rrn: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            lambda_coef: -1.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(SolverConfig::ta_reblock().lambda_for(100), 0.1);
    }

    #[test]
    fn solver_names_round_trip() {
        for k in [
            SolverKind::RorBk,
            SolverKind::Sobk,
            SolverKind::TaReblockU,
            SolverKind::FabGmres,
        ] {
            assert_eq!(k.name().parse::<SolverKind>().unwrap(), k);
        }
        assert!("gbk".parse::<SolverKind>().is_err());
    }
}
