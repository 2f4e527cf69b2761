use std::time::Duration;

use crate::blocking::sample_uniform;
use crate::error::{check_len, Result};
use crate::linalg::MatrixHandle;
use crate::rng::{seeded, SolverRng};
use crate::system::LinearSystem;

use super::driver::{self, LoopParams, OuterIteration, SolverState};
use super::setup::{BlockSetup, LambdaPolicy};
use super::{SolverConfig, SolverKind, SolverReport};

/// Updates per outer iteration.
const UPDATES_PER_ITER: usize = 4;

/// Tail-averaged regularized block Kaczmarz with uniform block sampling.
#[derive(Debug)]
pub struct TaReblockU<'a> {
    setup: BlockSetup<'a>,
    cfg: SolverConfig,
}

impl<'a> TaReblockU<'a> {
    pub fn new(a: &'a MatrixHandle, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let s = cfg.effective_block_rows(a.rows());
        let setup = BlockSetup::new(a, s, LambdaPolicy::Fixed(cfg.lambda_for(s)))?;
        Ok(Self {
            setup,
            cfg: cfg.clone(),
        })
    }

    /// The returned vector is the latest iterate when the run converged
    /// within `tail_window` iterations, otherwise the mean of the last
    /// `min(tail_window, iterations)` iterates.
    pub fn solve(
        &mut self,
        b: &[f64],
        x0: Vec<f64>,
        x_star: Option<&[f64]>,
        rng: &mut SolverRng,
    ) -> Result<(Vec<f64>, SolverReport)> {
        let a = self.setup.matrix();
        check_len("right-hand side", a.rows(), b.len())?;
        let params = LoopParams {
            tol: self.cfg.tol_rrn,
            max_iters: self.cfg.max_iters,
            time_limit: self.cfg.time_limit_s.map(Duration::from_secs_f64),
            record_iterates: self.cfg.record_iterates,
            keep_tail: self.cfg.tail_window,
        };
        let outcome = driver::run(self, a, b, x0, &params, rng)?;
        let averaged = if outcome.iterations == 0
            || (outcome.converged && outcome.iterations <= self.cfg.tail_window)
        {
            None
        } else {
            let tail: Vec<&[f64]> = outcome.tail.iter().map(Vec::as_slice).collect();
            Some(tail_average(&tail))
        };
        let setup_time = self.setup.setup_time();
        driver::finish(
            SolverKind::TaReblockU,
            outcome,
            setup_time,
            a,
            b,
            averaged,
            x_star,
        )
    }
}

impl OuterIteration for TaReblockU<'_> {
    fn before_check(
        &mut self,
        b: &[f64],
        state: &mut SolverState,
        rng: &mut SolverRng,
    ) -> Result<usize> {
        let k = self.setup.num_blocks();
        for _ in 0..UPDATES_PER_ITER {
            let t = sample_uniform(k, rng);
            self.setup.fixed_update(t, b, &mut state.x)?;
        }
        Ok(UPDATES_PER_ITER)
    }

    fn setup_time_in_loop(&self) -> Duration {
        self.setup.factor_time()
    }
}

/// Elementwise mean of a nonempty list of equal-length vectors.
pub fn tail_average(iterates: &[&[f64]]) -> Vec<f64> {
    let n = iterates[0].len();
    let mut mean = vec![0.0; n];
    for x in iterates {
        for (m, v) in mean.iter_mut().zip(x.iter()) {
            *m += v;
        }
    }
    let inv = 1.0 / iterates.len() as f64;
    mean.iter_mut().for_each(|m| *m *= inv);
    mean
}

/// Runs TA-ReBlocK-U on `sys` from `x0`. Pass a config built from
/// [`SolverConfig::ta_reblock`] to get its default regularization.
pub fn ta_reblock_u_solve(
    sys: &LinearSystem,
    x0: Vec<f64>,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolverReport)> {
    let mut solver = TaReblockU::new(&sys.a, cfg)?;
    let mut rng = seeded(cfg.seed);
    solver.solve(&sys.b, x0, sys.x_star.as_deref(), &mut rng)
}
