use std::time::Duration;

use crate::blocking::sample_uniform;
use crate::error::{check_len, Result};
use crate::linalg::MatrixHandle;
use crate::rng::{seeded, SolverRng};
use crate::system::LinearSystem;

use super::driver::{self, LoopParams, OuterIteration, SolverState};
use super::setup::{BlockSetup, LambdaPolicy};
use super::{SolverConfig, SolverKind, SolverReport};

/// SOBK-style baseline.
///
/// Each outer iteration draws a block `τ₁` uniformly, pairs it with the block
/// whose centroid is most orthogonal to it (`argmin_j C(τ₁, j)`, lowest index
/// on ties) and projects onto `τ₁`, `τ₂`, `τ₁` with (jittered) pseudo-inverse
/// updates.
#[derive(Debug)]
pub struct Sobk<'a> {
    setup: BlockSetup<'a>,
    partner: Vec<usize>,
    cfg: SolverConfig,
}

impl<'a> Sobk<'a> {
    pub fn new(a: &'a MatrixHandle, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let s = cfg.effective_block_rows(a.rows());
        let setup = BlockSetup::new(a, s, LambdaPolicy::PinvJitter)?;
        let k = setup.num_blocks();
        let c = setup.cosine();
        let partner = (0..k)
            .map(|i| {
                (0..k)
                    .filter(|&j| j != i || k == 1)
                    .fold(None::<(usize, f64)>, |best, j| match best {
                        Some((_, v)) if v <= c.get(i, j) => best,
                        _ => Some((j, c.get(i, j))),
                    })
                    .map_or(i, |(j, _)| j)
            })
            .collect();
        Ok(Self {
            setup,
            partner,
            cfg: cfg.clone(),
        })
    }

    pub fn partner(&self, t: usize) -> usize {
        self.partner[t]
    }

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
            keep_tail: 0,
        };
        let outcome = driver::run(self, a, b, x0, &params, rng)?;
        let setup_time = self.setup.setup_time();
        driver::finish(SolverKind::Sobk, outcome, setup_time, a, b, None, x_star)
    }
}

impl OuterIteration for Sobk<'_> {
    fn before_check(
        &mut self,
        b: &[f64],
        state: &mut SolverState,
        rng: &mut SolverRng,
    ) -> Result<usize> {
        let first = sample_uniform(self.setup.num_blocks(), rng);
        let second = self.partner[first];
        for t in [first, second, first] {
            self.setup.fixed_update(t, b, &mut state.x)?;
        }
        Ok(3)
    }

    fn setup_time_in_loop(&self) -> Duration {
        self.setup.factor_time()
    }
}

pub fn sobk_solve(
    sys: &LinearSystem,
    x0: Vec<f64>,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolverReport)> {
    let mut solver = Sobk::new(&sys.a, cfg)?;
    let mut rng = seeded(cfg.seed);
    solver.solve(&sys.b, x0, sys.x_star.as_deref(), &mut rng)
}
