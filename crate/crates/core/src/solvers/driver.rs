use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::error::{check_len, Error, Result};
use crate::linalg::vector::norm2;
use crate::linalg::MatrixHandle;
use crate::rng::SolverRng;

/// Iterate and its most recently refreshed residual.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x: Vec<f64>,
    /// `b - A x` as of the last refresh.
    pub r: Vec<f64>,
    pub iter: usize,
}

impl SolverState {
    pub fn new(a: &MatrixHandle, b: &[f64], x0: Vec<f64>) -> Result<Self> {
        check_len("initial iterate", a.cols(), x0.len())?;
        let r = a.residual(b, &x0)?;
        Ok(Self { x: x0, r, iter: 0 })
    }

    pub fn refresh(&mut self, a: &MatrixHandle, b: &[f64]) -> Result<()> {
        self.r = a.residual(b, &self.x)?;
        Ok(())
    }
}

/// The solver-specific part of an outer iteration.
pub(crate) trait OuterIteration {
    /// Updates applied before the residual refresh.
    fn before_check(
        &mut self,
        b: &[f64],
        state: &mut SolverState,
        rng: &mut SolverRng,
    ) -> Result<usize>;

    /// Updates applied after a failed convergence check, using `state.r`.
    fn after_check(&mut self, _b: &[f64], _state: &mut SolverState) -> Result<usize> {
        Ok(0)
    }

    /// Cumulative time that should be booked as setup rather than solve time.
    fn setup_time_in_loop(&self) -> Duration;
}

pub(crate) struct LoopParams {
    pub tol: f64,
    pub max_iters: usize,
    pub time_limit: Option<Duration>,
    pub record_iterates: bool,
    pub keep_tail: usize,
}

pub(crate) struct LoopOutcome {
    pub state: SolverState,
    pub iterations: usize,
    pub block_updates: usize,
    pub rrn_history: Vec<f64>,
    pub converged: bool,
    pub iterates: Vec<Vec<f64>>,
    pub tail: VecDeque<Vec<f64>>,
    pub loop_time: Duration,
}

/// RRN denominator; a zero right-hand side falls back to the absolute
/// residual so that `x = 0` is recognized as converged.
pub(crate) fn rrn_scale(b: &[f64]) -> f64 {
    let nb = norm2(b);
    if nb > 0.0 {
        nb
    } else {
        1.0
    }
}

pub(crate) fn run<S: OuterIteration + ?Sized>(
    solver: &mut S,
    a: &MatrixHandle,
    b: &[f64],
    x0: Vec<f64>,
    params: &LoopParams,
    rng: &mut SolverRng,
) -> Result<LoopOutcome> {
    let start = Instant::now();
    let setup_before = solver.setup_time_in_loop();
    let scale = rrn_scale(b);
    let mut state = SolverState::new(a, b, x0)?;
    let mut rrn = norm2(&state.r) / scale;
    if !rrn.is_finite() {
        return Err(Error::DivergenceDetected { iteration: 0 });
    }
    let mut history = vec![rrn];
    let mut iterates = Vec::new();
    let mut tail = VecDeque::with_capacity(params.keep_tail);
    let mut block_updates = 0;
    let mut converged = rrn < params.tol;

    while !converged && state.iter < params.max_iters {
        block_updates += solver.before_check(b, &mut state, rng)?;
        state.refresh(a, b)?;
        state.iter += 1;
        rrn = norm2(&state.r) / scale;
        if !rrn.is_finite() {
            return Err(Error::DivergenceDetected {
                iteration: state.iter,
            });
        }
        history.push(rrn);
        if params.record_iterates {
            iterates.push(state.x.clone());
        }
        if params.keep_tail > 0 {
            if tail.len() == params.keep_tail {
                tail.pop_front();
            }
            tail.push_back(state.x.clone());
        }
        converged = rrn < params.tol;
        let out_of_time = params
            .time_limit
            .is_some_and(|limit| start.elapsed() >= limit);
        if converged || state.iter == params.max_iters || out_of_time {
            break;
        }
        block_updates += solver.after_check(b, &mut state)?;
    }

    let setup_in_loop = solver.setup_time_in_loop().saturating_sub(setup_before);
    let loop_time = start.elapsed().saturating_sub(setup_in_loop);
    Ok(LoopOutcome {
        iterations: state.iter,
        state,
        block_updates,
        rrn_history: history,
        converged,
        iterates,
        tail,
        loop_time,
    })
}

/// Assembles the report for a finished loop. `x_out` replaces the final
/// iterate as the returned vector when the solver post-processes iterates.
pub(crate) fn finish(
    solver: super::SolverKind,
    outcome: LoopOutcome,
    setup_time: Duration,
    a: &MatrixHandle,
    b: &[f64],
    x_out: Option<Vec<f64>>,
    x_star: Option<&[f64]>,
) -> Result<(Vec<f64>, super::SolverReport)> {
    let final_rrn = *outcome.rrn_history.last().expect("history is never empty");
    let (x, output_rrn) = match x_out {
        Some(x) => {
            let rrn = norm2(&a.residual(b, &x)?) / rrn_scale(b);
            (x, rrn)
        }
        None => (outcome.state.x, final_rrn),
    };
    let final_re = x_star.map(|xs| super::relative_error(&x, xs)).transpose()?;
    let report = super::SolverReport {
        solver,
        iterations: outcome.iterations,
        block_updates: outcome.block_updates,
        wall_time_s: outcome.loop_time.as_secs_f64(),
        setup_time_s: setup_time.as_secs_f64(),
        rrn_history: outcome.rrn_history,
        final_rrn,
        output_rrn,
        final_re,
        converged: outcome.converged,
        iterates: outcome.iterates,
    };
    Ok((x, report))
}
