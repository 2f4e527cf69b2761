use std::time::Duration;

use crate::blocking::sample_block;
use crate::error::{check_len, Error, Result};
use crate::linalg::vector::axpy;
use crate::linalg::{factor_block, regularized_apply, MatrixHandle, RowBlock};
use crate::rng::{seeded, SolverRng};
use crate::system::LinearSystem;

use super::driver::{self, LoopParams, OuterIteration, SolverState};
use super::selection::select_residual_block;
use super::setup::{BlockSetup, LambdaPolicy};
use super::{SolverConfig, SolverKind, SolverReport};

/// Residue and orthogonality based regularized block Kaczmarz.
///
/// One outer iteration makes `orth_updates` regularized projections onto
/// fixed blocks drawn from the effective-orthogonality distribution, then
/// one projection onto the rows with the largest current residuals.
#[derive(Debug)]
pub struct RorBk<'a> {
    setup: BlockSetup<'a>,
    cfg: SolverConfig,
    lambda: f64,
    dynamic_rows: usize,
}

impl<'a> RorBk<'a> {
    pub fn new(a: &'a MatrixHandle, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let s = cfg.effective_block_rows(a.rows());
        let lambda = cfg.lambda_for(s);
        let setup = BlockSetup::new(a, s, LambdaPolicy::Fixed(lambda))?;
        Ok(Self {
            setup,
            cfg: cfg.clone(),
            lambda,
            dynamic_rows: s,
        })
    }

    pub fn setup(&self) -> &BlockSetup<'a> {
        &self.setup
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The sampled fixed-block updates of one outer iteration.
    pub fn fixed_updates(
        &mut self,
        b: &[f64],
        state: &mut SolverState,
        rng: &mut SolverRng,
    ) -> Result<usize> {
        for _ in 0..self.cfg.orth_updates {
            let t = sample_block(self.setup.distribution(), rng);
            self.setup.fixed_update(t, b, &mut state.x)?;
        }
        Ok(self.cfg.orth_updates)
    }

    /// Projection onto the rows with the largest entries of `state.r`. The
    /// block changes every iteration, so its factor is not cached.
    pub fn dynamic_update(&self, state: &mut SolverState) -> Result<()> {
        let a = self.setup.matrix();
        let selection = select_residual_block(&state.r, self.dynamic_rows)?;
        if selection.score == 0.0 {
            return Ok(());
        }
        let resid: Vec<f64> = selection.indices.iter().map(|&i| state.r[i]).collect();
        let block = RowBlock::dynamic(a, selection.indices)?;
        let factor = factor_block(&block, self.lambda)?;
        let delta = regularized_apply(&factor, &block, &resid)?;
        axpy(1.0, &delta, &mut state.x);
        Ok(())
    }

    /// One full outer iteration: sampled updates, residual refresh, dynamic
    /// update.
    pub fn iterate(
        &mut self,
        b: &[f64],
        state: &mut SolverState,
        rng: &mut SolverRng,
    ) -> Result<()> {
        self.fixed_updates(b, state, rng)?;
        state.refresh(self.setup.matrix(), b)?;
        state.iter += 1;
        self.dynamic_update(state)?;
        if !crate::linalg::vector::all_finite(&state.x) {
            return Err(Error::DivergenceDetected {
                iteration: state.iter,
            });
        }
        Ok(())
    }

    /// Solves `A x = b` with the configured tolerance and iteration cap.
    pub fn solve(
        &mut self,
        b: &[f64],
        x0: Vec<f64>,
        x_star: Option<&[f64]>,
        rng: &mut SolverRng,
    ) -> Result<(Vec<f64>, SolverReport)> {
        let params = LoopParams {
            tol: self.cfg.tol_rrn,
            max_iters: self.cfg.max_iters,
            time_limit: self.cfg.time_limit_s.map(Duration::from_secs_f64),
            record_iterates: self.cfg.record_iterates,
            keep_tail: 0,
        };
        self.solve_with(b, x0, x_star, &params, rng)
    }

    /// Like [`RorBk::solve`] with an explicit tolerance and iteration cap,
    /// as used for inner iterations.
    pub fn solve_limited(
        &mut self,
        b: &[f64],
        x0: Vec<f64>,
        tol: f64,
        max_iters: usize,
        rng: &mut SolverRng,
    ) -> Result<(Vec<f64>, SolverReport)> {
        let params = LoopParams {
            tol,
            max_iters,
            time_limit: None,
            record_iterates: false,
            keep_tail: 0,
        };
        self.solve_with(b, x0, None, &params, rng)
    }

    fn solve_with(
        &mut self,
        b: &[f64],
        x0: Vec<f64>,
        x_star: Option<&[f64]>,
        params: &LoopParams,
        rng: &mut SolverRng,
    ) -> Result<(Vec<f64>, SolverReport)> {
        let a = self.setup.matrix();
        check_len("right-hand side", a.rows(), b.len())?;
        let outcome = driver::run(self, a, b, x0, params, rng)?;
        let setup_time = self.setup.setup_time();
        driver::finish(SolverKind::RorBk, outcome, setup_time, a, b, None, x_star)
    }
}

impl OuterIteration for RorBk<'_> {
    fn before_check(
        &mut self,
        b: &[f64],
        state: &mut SolverState,
        rng: &mut SolverRng,
    ) -> Result<usize> {
        self.fixed_updates(b, state, rng)
    }

    fn after_check(&mut self, _b: &[f64], state: &mut SolverState) -> Result<usize> {
        self.dynamic_update(state)?;
        Ok(1)
    }

    fn setup_time_in_loop(&self) -> Duration {
        self.setup.factor_time()
    }
}

/// Runs ROR-BK on `sys` from `x0`, seeded from `cfg.seed`.
pub fn ror_bk_solve(
    sys: &LinearSystem,
    x0: Vec<f64>,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolverReport)> {
    let mut solver = RorBk::new(&sys.a, cfg)?;
    let mut rng = seeded(cfg.seed);
    solver.solve(&sys.b, x0, sys.x_star.as_deref(), &mut rng)
}
