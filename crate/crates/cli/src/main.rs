use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use rorbk_cli::{
    emit_report, render_report, run_benchmark, run_solver, write_trial_log, BenchResult, BenchSpec,
    Init, ReportFormat, SolverConfigs, TrialLog,
};
use rorbk_core::generate::{generate_system, GeneratorSpec};
use rorbk_core::{SolverConfig, SolverKind};

/// Block Kaczmarz and flexible GMRES solvers for consistent linear systems.
#[derive(Parser)]
#[command(name = "rorbk", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one system with a planted N(0, 1) solution.
    Solve(SolveArgs),
    /// Run a benchmark described by a JSON spec.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Matrix Market path, gen:randn:MxN or gen:onepr:MxN.
    #[arg(long)]
    matrix: String,
    /// ror-bk, sobk, ta-reblock-u or fab-gmres.
    #[arg(long, default_value = "ror-bk")]
    solver: SolverKind,
    #[arg(long, default_value_t = 100)]
    block_rows: usize,
    /// Defaults to 1e-3 for ta-reblock-u and 1e-6 otherwise.
    #[arg(long)]
    lambda_coef: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Outer iteration limit (Krylov dimension for fab-gmres).
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Seeds the matrix, the planted solution and the solver.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Init::Zero)]
    init: Init,
    /// Inner tolerance for fab-gmres.
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Inner iteration limit for fab-gmres.
    #[arg(long, default_value_t = 50)]
    inner_max: usize,
    /// Wall-clock limit in seconds for the solve loop (inner loops for fab-gmres).
    #[arg(long)]
    timeout: Option<f64>,
    /// Report file; .md selects Markdown.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Writes `iteration,rrn` per outer iteration.
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Overrides the output path of the benchmark file.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(anyhow::Error),
    Solver(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<rorbk_core::Error> for Failure {
    fn from(e: rorbk_core::Error) -> Self {
        Failure::Input(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn solver_configs(args: &SolveArgs) -> SolverConfigs {
    let base = SolverConfig {
        block_rows: args.block_rows,
        lambda_coef: args.lambda_coef.unwrap_or(1e-6),
        tol_rrn: args.tol,
        max_iters: args.max_iters,
        seed: args.seed,
        time_limit_s: args.timeout,
        ..SolverConfig::default()
    };
    let mut configs = SolverConfigs {
        ror_bk: base.clone(),
        sobk: base.clone(),
        ta_reblock_u: SolverConfig {
            lambda_coef: args.lambda_coef.unwrap_or(1e-3),
            ..base.clone()
        },
        ..SolverConfigs::default()
    };
    let f = &mut configs.fab_gmres;
    f.eta = args.eta;
    f.inner_max = args.inner_max;
    f.outer_max = args.max_iters;
    f.tol_rrn = args.tol;
    f.inner = base;
    configs
}

fn solve(args: SolveArgs) -> Result<bool, Failure> {
    let configs = solver_configs(&args);
    configs.validate().context("invalid solver options")?;
    let generator = GeneratorSpec::parse(&args.matrix)?;
    let sys = generate_system(&generator, args.seed)
        .with_context(|| format!("cannot load {}", args.matrix))?;
    let out = run_solver(args.solver, &sys, args.init, &configs)
        .map_err(|e| Failure::Solver(e.into()))?;
    println!(
        "{} on {} ({}x{}): {} iterations, RRN {:.3e}, RE {}, setup {:.3}s, solve {:.3}s, {}",
        args.solver.label(),
        sys.name,
        sys.rows(),
        sys.cols(),
        out.iterations,
        out.rrn,
        out.re.map_or("n/a".into(), |re| format!("{re:.3e}")),
        out.setup_s,
        out.solve_s,
        if out.converged {
            "converged"
        } else {
            "NOT converged"
        }
    );
    if let Some(path) = &args.history {
        let mut w = std::io::BufWriter::new(
            std::fs::File::create(path)
                .with_context(|| format!("cannot write {}", path.display()))?,
        );
        let write = |w: &mut std::io::BufWriter<std::fs::File>| -> std::io::Result<()> {
            writeln!(w, "iteration,rrn")?;
            for (i, r) in out.rrn_history.iter().enumerate() {
                writeln!(w, "{i},{r:e}")?;
            }
            w.flush()
        };
        write(&mut w).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(path) = &args.out {
        let result = BenchResult::from_trials(vec![TrialLog {
            system: sys.name.clone(),
            solver: args.solver,
            trial: 0,
            seed: args.seed,
            iterations: out.iterations,
            setup_s: out.setup_s,
            solve_s: out.solve_s,
            total_s: out.total_s(),
            rrn: out.rrn,
            re: out.re,
            converged: out.converged,
            error: None,
        }]);
        emit_report(&result, path, ReportFormat::from_path(path))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(out.converged)
}

fn bench(args: BenchArgs) -> Result<bool, Failure> {
    let spec = BenchSpec::from_path(&args.spec)?;
    let result = run_benchmark(&spec)?;
    let output = spec.output.as_ref();
    let path = args.out.or_else(|| output.map(|o| o.path.clone()));
    match &path {
        Some(path) => {
            let format = output
                .and_then(|o| o.format)
                .unwrap_or_else(|| ReportFormat::from_path(path));
            emit_report(&result, path, format)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => print!("{}", render_report(&result.cells, ReportFormat::Markdown)),
    }
    if let Some(log) = output.and_then(|o| o.trial_log.as_ref()) {
        write_trial_log(&result.trials, log)
            .with_context(|| format!("cannot write {}", log.display()))?;
    }
    for c in result.cells.iter().filter(|c| !c.ok()) {
        eprintln!(
            "{} / {}: {} of {} trials failed, {} did not converge",
            c.system, c.solver, c.failed, c.trials, c.unconverged
        );
    }
    Ok(result.all_converged())
}
