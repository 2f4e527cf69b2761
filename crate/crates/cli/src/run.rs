//! One solve of one system with any of the four solvers.

use std::time::Instant;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use rorbk_core::analysis::initial_solution;
use rorbk_core::fgmres::{fab_gmres_solve, FgmresConfig};
use rorbk_core::solvers::{ror_bk_solve, sobk_solve, ta_reblock_u_solve};
use rorbk_core::{LinearSystem, Result, SolverConfig, SolverKind, SolverReport};

/// Starting vector of every solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    #[default]
    Zero,
    /// Scaled sum of rows, see [`initial_solution`].
    Rowsum,
}

/// Per-solver configuration; absent keys keep their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfigs {
    pub ror_bk: SolverConfig,
    pub sobk: SolverConfig,
    pub ta_reblock_u: SolverConfig,
    pub fab_gmres: FgmresConfig,
}

impl Default for SolverConfigs {
    fn default() -> Self {
        Self {
            ror_bk: SolverConfig::default(),
            sobk: SolverConfig::default(),
            ta_reblock_u: SolverConfig::ta_reblock(),
            fab_gmres: FgmresConfig::default(),
        }
    }
}

impl SolverConfigs {
    pub fn validate(&self) -> Result<()> {
        self.ror_bk.validate()?;
        self.sobk.validate()?;
        self.ta_reblock_u.validate()?;
        self.fab_gmres.validate()
    }

    /// Same random stream seed for every solver.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        out.ror_bk.seed = seed;
        out.sobk.seed = seed;
        out.ta_reblock_u.seed = seed;
        out.fab_gmres.inner.seed = seed;
        out
    }

    pub fn tol(&self, kind: SolverKind) -> f64 {
        match kind {
            SolverKind::RorBk => self.ror_bk.tol_rrn,
            SolverKind::Sobk => self.sobk.tol_rrn,
            SolverKind::TaReblockU => self.ta_reblock_u.tol_rrn,
            SolverKind::FabGmres => self.fab_gmres.tol_rrn,
        }
    }
}

/// Solver-independent summary of a finished solve.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    /// Outer iterations.
    pub iterations: usize,
    /// Setup including the initial solution, in seconds.
    pub setup_s: f64,
    pub solve_s: f64,
    /// RRN of the returned vector.
    pub rrn: f64,
    pub re: Option<f64>,
    pub converged: bool,
    pub rrn_history: Vec<f64>,
}

impl SolveOutcome {
    pub fn total_s(&self) -> f64 {
        self.setup_s + self.solve_s
    }

    fn from_kaczmarz(x: Vec<f64>, r: SolverReport, tol: f64, init_s: f64) -> Self {
        Self {
            x,
            iterations: r.iterations,
            setup_s: r.setup_time_s + init_s,
            solve_s: r.wall_time_s,
            // Tail averaging returns a vector other than the last iterate.
            rrn: r.output_rrn,
            re: r.final_re,
            converged: r.output_rrn < tol,
            rrn_history: r.rrn_history,
        }
    }
}

pub fn run_solver(
    kind: SolverKind,
    sys: &LinearSystem,
    init: Init,
    configs: &SolverConfigs,
) -> Result<SolveOutcome> {
    let start = Instant::now();
    let x0 = match init {
        Init::Zero => vec![0.0; sys.cols()],
        Init::Rowsum => initial_solution(&sys.a, &sys.b)?.x0,
    };
    let init_s = start.elapsed().as_secs_f64();
    let tol = configs.tol(kind);
    Ok(match kind {
        SolverKind::RorBk => {
            let (x, r) = ror_bk_solve(sys, x0, &configs.ror_bk)?;
            SolveOutcome::from_kaczmarz(x, r, tol, init_s)
        }
        SolverKind::Sobk => {
            let (x, r) = sobk_solve(sys, x0, &configs.sobk)?;
            SolveOutcome::from_kaczmarz(x, r, tol, init_s)
        }
        SolverKind::TaReblockU => {
            let (x, r) = ta_reblock_u_solve(sys, x0, &configs.ta_reblock_u)?;
            SolveOutcome::from_kaczmarz(x, r, tol, init_s)
        }
        SolverKind::FabGmres => {
            let (x, r) = fab_gmres_solve(sys, x0, &configs.fab_gmres)?;
            SolveOutcome {
                x,
                iterations: r.outer_iterations,
                setup_s: r.setup_time_s + init_s,
                solve_s: r.wall_time_s,
                rrn: r.final_rrn,
                re: r.final_re,
                converged: r.converged,
                rrn_history: r.rrn_history,
            }
        }
    })
}
