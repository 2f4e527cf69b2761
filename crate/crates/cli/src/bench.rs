//! Benchmark specification and the system × solver × trial loop.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use rorbk_core::generate::{planted_system, GeneratorSpec};
use rorbk_core::rng::{derive_seed, seeded};
use rorbk_core::SolverKind;

use crate::report::ReportFormat;
use crate::run::{run_solver, Init, SolverConfigs};

/// A matrix source: `"gen:randn:MxN"`, `"gen:onepr:MxN"`, a path, or a
/// tagged object such as `{"kind": "randn", "m": 500, "n": 50}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSource {
    Shorthand(String),
    Spec(GeneratorSpec),
}

impl SystemSource {
    pub fn generator(&self) -> rorbk_core::Result<GeneratorSpec> {
        match self {
            SystemSource::Shorthand(s) => GeneratorSpec::parse(s),
            SystemSource::Spec(g) => Ok(g.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    /// Inferred from the extension when absent.
    #[serde(default)]
    pub format: Option<ReportFormat>,
    /// Optional JSON-lines file with one record per trial.
    #[serde(default)]
    pub trial_log: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub systems: Vec<SystemSource>,
    pub solvers: Vec<SolverKind>,
    /// Right-hand sides per system.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Master seed; matrices, planted solutions and solver streams derive from it.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub init: Init,
    #[serde(default)]
    pub configs: SolverConfigs,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

fn default_trials() -> usize {
    5
}

fn default_seed() -> u64 {
    42
}

impl BenchSpec {
    pub fn from_json(src: &str) -> anyhow::Result<Self> {
        let spec: Self = serde_json::from_str(src).context("invalid benchmark spec")?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let src = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_json(&src).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.trials == 0 {
            bail!("trials must be >= 1");
        }
        if self.solvers.is_empty() {
            bail!("at least one solver is required");
        }
        if self.systems.is_empty() {
            bail!("at least one system is required");
        }
        self.configs.validate()?;
        Ok(())
    }
}

/// One solve; `error` is set when the solver failed outright.
#[derive(Debug, Clone, Serialize)]
pub struct TrialLog {
    pub system: String,
    pub solver: SolverKind,
    pub trial: usize,
    pub seed: u64,
    pub iterations: usize,
    pub setup_s: f64,
    pub solve_s: f64,
    pub total_s: f64,
    pub rrn: f64,
    pub re: Option<f64>,
    pub converged: bool,
    pub error: Option<String>,
}

/// Means over the trials of one (system, solver) pair that did not error.
#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub system: String,
    pub solver: SolverKind,
    pub trials: usize,
    pub failed: usize,
    pub unconverged: usize,
    pub mean_it: f64,
    pub mean_setup_s: f64,
    pub mean_solve_s: f64,
    pub mean_total_s: f64,
    pub mean_rrn: f64,
    pub mean_re: Option<f64>,
    /// `mean_it / mean_it(ROR-BK)`; absent without a ROR-BK cell.
    pub it_speedup: Option<f64>,
    /// Same ratio for setup plus solve time.
    pub cpu_speedup: Option<f64>,
}

impl CellResult {
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.unconverged == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchResult {
    pub cells: Vec<CellResult>,
    pub trials: Vec<TrialLog>,
}

impl BenchResult {
    pub fn all_converged(&self) -> bool {
        self.cells.iter().all(CellResult::ok)
    }

    /// Aggregates trial logs, in first-appearance order of (system, solver).
    pub fn from_trials(trials: Vec<TrialLog>) -> Self {
        let mut keys: Vec<(String, SolverKind)> = Vec::new();
        for t in &trials {
            let key = (t.system.clone(), t.solver);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let mut cells: Vec<CellResult> = keys
            .into_iter()
            .map(|(system, solver)| {
                let logs: Vec<&TrialLog> = trials
                    .iter()
                    .filter(|t| t.system == system && t.solver == solver)
                    .collect();
                aggregate(system, solver, &logs)
            })
            .collect();
        for i in 0..cells.len() {
            let reference = cells
                .iter()
                .find(|c| c.system == cells[i].system && c.solver == SolverKind::RorBk)
                .map(|c| (c.mean_it, c.mean_total_s));
            if let Some((it, total)) = reference {
                cells[i].it_speedup = Some(cells[i].mean_it / it);
                cells[i].cpu_speedup = Some(cells[i].mean_total_s / total);
            }
        }
        Self { cells, trials }
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

fn aggregate(system: String, solver: SolverKind, logs: &[&TrialLog]) -> CellResult {
    let ok: Vec<&TrialLog> = logs.iter().copied().filter(|t| t.error.is_none()).collect();
    let mean_re = if !ok.is_empty() && ok.iter().all(|t| t.re.is_some()) {
        Some(mean(ok.iter().filter_map(|t| t.re)))
    } else {
        None
    };
    CellResult {
        system,
        solver,
        trials: logs.len(),
        failed: logs.len() - ok.len(),
        unconverged: ok.iter().filter(|t| !t.converged).count(),
        mean_it: mean(ok.iter().map(|t| t.iterations as f64)),
        mean_setup_s: mean(ok.iter().map(|t| t.setup_s)),
        mean_solve_s: mean(ok.iter().map(|t| t.solve_s)),
        mean_total_s: mean(ok.iter().map(|t| t.total_s)),
        mean_rrn: mean(ok.iter().map(|t| t.rrn)),
        mean_re,
        it_speedup: None,
        cpu_speedup: None,
    }
}

/// Runs every solver on every trial of every system. Unreadable sources
/// abort the run; solver errors are logged in the affected trial.
///
/// Seeds: system `i` draws its matrix from `derive_seed(seed, i)`; trial `t`
/// draws `x_star` from `derive_seed(that, t + 1)`, and all solvers of the
/// trial share one stream seed derived from the trial seed.
pub fn run_benchmark(spec: &BenchSpec) -> anyhow::Result<BenchResult> {
    spec.validate()?;
    let mut logs = Vec::new();
    let mut names = HashSet::new();
    for (i, source) in spec.systems.iter().enumerate() {
        let generator = source.generator()?;
        let matrix_seed = derive_seed(spec.seed, i as u64);
        let a = generator
            .matrix(&mut seeded(matrix_seed))
            .with_context(|| format!("cannot load system {}", generator.label()))?;
        let mut name = generator.label();
        if !names.insert(name.clone()) {
            name = format!("{name}#{i}");
            names.insert(name.clone());
        }
        log::info!("{name}: {}x{}, nnz {}", a.rows(), a.cols(), a.nnz());
        for trial in 0..spec.trials {
            let trial_seed = derive_seed(matrix_seed, trial as u64 + 1);
            let sys = planted_system(name.clone(), a.clone(), &mut seeded(trial_seed))?;
            let solver_seed = derive_seed(trial_seed, 0);
            let configs = spec.configs.with_seed(solver_seed);
            for &solver in &spec.solvers {
                let log = match run_solver(solver, &sys, spec.init, &configs) {
                    Ok(out) => TrialLog {
                        system: name.clone(),
                        solver,
                        trial,
                        seed: solver_seed,
                        iterations: out.iterations,
                        setup_s: out.setup_s,
                        solve_s: out.solve_s,
                        total_s: out.total_s(),
                        rrn: out.rrn,
                        re: out.re,
                        converged: out.converged,
                        error: None,
                    },
                    Err(e) => {
                        log::warn!("{name} / {solver} / trial {trial}: {e}");
                        TrialLog {
                            system: name.clone(),
                            solver,
                            trial,
                            seed: solver_seed,
                            iterations: 0,
                            setup_s: 0.0,
                            solve_s: 0.0,
                            total_s: 0.0,
                            rrn: f64::NAN,
                            re: None,
                            converged: false,
                            error: Some(e.to_string()),
                        }
                    }
                };
                log::debug!(
                    "{name} / {solver} / trial {trial}: IT {} RRN {:.3e}",
                    log.iterations,
                    log.rrn
                );
                logs.push(log);
            }
        }
    }
    Ok(BenchResult::from_trials(logs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log(solver: SolverKind, iterations: usize, total_s: f64) -> TrialLog {
        TrialLog {
            system: "s".into(),
            solver,
            trial: 0,
            seed: 0,
            iterations,
            setup_s: 0.0,
            solve_s: total_s,
            total_s,
            rrn: 1e-7,
            re: None,
            converged: true,
            error: None,
        }
    }

    #[test]
    fn self_speedup_is_one() {
        let r = BenchResult::from_trials(vec![log(SolverKind::RorBk, 10, 1.0)]);
        assert_eq!(r.cells[0].it_speedup, Some(1.0));
        assert_eq!(r.cells[0].cpu_speedup, Some(1.0));
    }

    #[test]
    fn speedup_is_method_over_reference() {
        let r = BenchResult::from_trials(vec![
            log(SolverKind::RorBk, 10, 1.0),
            log(SolverKind::Sobk, 20, 3.0),
        ]);
        assert_eq!(r.cells[1].it_speedup, Some(2.0));
        assert_eq!(r.cells[1].cpu_speedup, Some(3.0));
    }

    #[test]
    fn no_reference_means_no_speedup() {
        let r = BenchResult::from_trials(vec![log(SolverKind::Sobk, 20, 3.0)]);
        assert_eq!(r.cells[0].it_speedup, None);
    }

    #[test]
    fn errored_trials_are_excluded_from_means() {
        let mut bad = log(SolverKind::RorBk, 0, 0.0);
        bad.error = Some("boom".into());
        bad.rrn = f64::NAN;
        let r = BenchResult::from_trials(vec![log(SolverKind::RorBk, 10, 1.0), bad]);
        let c = &r.cells[0];
        assert_eq!((c.trials, c.failed, c.mean_it), (2, 1, 10.0));
        assert!(!r.all_converged());
    }

    #[test]
    fn spec_defaults_and_validation() {
        let spec =
            BenchSpec::from_json(r#"{"systems": ["gen:randn:20x5"], "solvers": ["ror-bk"]}"#)
                .unwrap();
        assert_eq!((spec.trials, spec.seed, spec.init), (5, 42, Init::Zero));
        assert!(BenchSpec::from_json(r#"{"systems": ["gen:randn:20x5"], "solvers": []}"#).is_err());
        assert!(BenchSpec::from_json(
            r#"{"systems": ["gen:randn:20x5"], "solvers": ["ror-bk"], "trials": 0}"#
        )
        .is_err());
        assert!(BenchSpec::from_json(r#"{"systems": [], "solvers": ["x"]}"#).is_err());
    }

    #[test]
    fn tagged_sources_parse() {
        let spec = BenchSpec::from_json(
            r#"{"systems": [{"kind": "one-plus-rand", "m": 4, "n": 3}], "solvers": ["sobk"],
                "configs": {"sobk": {"block_rows": 2}}}"#,
        )
        .unwrap();
        assert_eq!(
            spec.systems[0].generator().unwrap(),
            GeneratorSpec::OnePlusRand { m: 4, n: 3 }
        );
        assert_eq!(spec.configs.sobk.block_rows, 2);
        assert_eq!(spec.configs.ror_bk.block_rows, 100);
    }
}
