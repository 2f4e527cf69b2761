//! Right preconditioners `z_k ≈ B v_k` for flexible AB-GMRES.

use crate::error::{check_len, Result};
use crate::linalg::MatrixHandle;
use crate::rng::{seeded, SolverRng};
use crate::solvers::{RorBk, SolverConfig};

/// Maps a basis vector of length `m` to a direction of length `n`. The map
/// may change from call to call.
pub trait FlexiblePreconditioner {
    /// Returns `z` and the number of inner iterations spent on it.
    fn apply(&mut self, v: &[f64]) -> Result<(Vec<f64>, usize)>;
}

/// `z = Aᵀ v`; turns the outer loop into plain AB-GMRES with `B = Aᵀ`.
#[derive(Debug, Clone, Copy)]
pub struct TransposePreconditioner<'a> {
    a: &'a MatrixHandle,
}

impl<'a> TransposePreconditioner<'a> {
    pub fn new(a: &'a MatrixHandle) -> Self {
        Self { a }
    }
}

impl FlexiblePreconditioner for TransposePreconditioner<'_> {
    fn apply(&mut self, v: &[f64]) -> Result<(Vec<f64>, usize)> {
        Ok((self.a.matvec_transpose(v)?, 0))
    }
}

/// At most `inner_max` ROR-BK iterations on `A z = v` from `z = 0`, stopping
/// once `‖v − A z‖ < η ‖v‖`. The last iterate is returned whether or not the
/// tolerance was met.
pub fn inner_precondition(
    solver: &mut RorBk<'_>,
    v: &[f64],
    eta: f64,
    inner_max: usize,
    rng: &mut SolverRng,
) -> Result<(Vec<f64>, usize)> {
    let n = solver.setup().matrix().cols();
    check_len("basis vector", solver.setup().matrix().rows(), v.len())?;
    let (z, report) = solver.solve_limited(v, vec![0.0; n], eta, inner_max, rng)?;
    Ok((z, report.iterations))
}

/// ROR-BK inner iterations sharing one block setup and one random stream
/// across all outer steps.
#[derive(Debug)]
pub struct RorBkPreconditioner<'a> {
    solver: RorBk<'a>,
    rng: SolverRng,
    eta: f64,
    inner_max: usize,
}

impl<'a> RorBkPreconditioner<'a> {
    pub fn new(
        a: &'a MatrixHandle,
        cfg: &SolverConfig,
        eta: f64,
        inner_max: usize,
    ) -> Result<Self> {
        Ok(Self {
            solver: RorBk::new(a, cfg)?,
            rng: seeded(cfg.seed),
            eta,
            inner_max,
        })
    }

    pub fn solver(&self) -> &RorBk<'a> {
        &self.solver
    }
}

impl FlexiblePreconditioner for RorBkPreconditioner<'_> {
    fn apply(&mut self, v: &[f64]) -> Result<(Vec<f64>, usize)> {
        inner_precondition(&mut self.solver, v, self.eta, self.inner_max, &mut self.rng)
    }
}
