//! Benchmark orchestration and report emission for the `rorbk` binary.
//!
//! A benchmark is described by a JSON [`BenchSpec`]:
//!
//! ```json
//! {
//!   "systems": ["gen:onepr:2000x200", "matrices/lap2d.mtx"],
//!   "solvers": ["ror-bk", "sobk", "ta-reblock-u", "fab-gmres"],
//!   "trials": 5,
//!   "seed": 42,
//!   "init": "zero",
//!   "configs": { "ror_bk": { "block_rows": 100 }, "fab_gmres": { "eta": 0.1 } },
//!   "output": { "path": "report.csv", "format": "csv", "trial_log": "trials.jsonl" }
//! }
//! ```

pub mod bench;
pub mod report;
pub mod run;

pub use bench::{
    run_benchmark, BenchResult, BenchSpec, CellResult, OutputSpec, SystemSource, TrialLog,
};
pub use report::{emit_report, format_sig, render_report, write_trial_log, ReportFormat};
pub use run::{run_solver, Init, SolveOutcome, SolverConfigs};
