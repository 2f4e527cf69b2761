//! CSV and Markdown tables of benchmark cells.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::bench::{BenchResult, CellResult, TrialLog};

pub const COLUMNS: [&str; 9] = [
    "system",
    "solver",
    "mean_it",
    "mean_setup_s",
    "mean_solve_s",
    "mean_rrn",
    "mean_re",
    "it_speedup",
    "cpu_speedup",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl ReportFormat {
    /// `.md` and `.markdown` select Markdown; anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("md" | "markdown") => ReportFormat::Markdown,
            _ => ReportFormat::Csv,
        }
    }
}

/// Six significant digits, fixed notation for exponents in `-4..6` and
/// scientific otherwise, trailing zeros dropped.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        trim_zeros(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

fn row(c: &CellResult) -> [String; 9] {
    [
        c.system.clone(),
        c.solver.to_string(),
        format_sig(c.mean_it),
        format_sig(c.mean_setup_s),
        format_sig(c.mean_solve_s),
        format_sig(c.mean_rrn),
        opt(c.mean_re),
        opt(c.it_speedup),
        opt(c.cpu_speedup),
    ]
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_report(cells: &[CellResult], format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(&COLUMNS.join(","));
            out.push('\n');
            for c in cells {
                let fields: Vec<String> = row(c).iter().map(|f| csv_field(f)).collect();
                out.push_str(&fields.join(","));
                out.push('\n');
            }
        }
        ReportFormat::Markdown => {
            out.push_str(&format!("| {} |\n", COLUMNS.join(" | ")));
            out.push_str(&format!("|{}\n", "---|".repeat(COLUMNS.len())));
            for c in cells {
                let fields: Vec<String> = row(c).iter().map(|f| f.replace('|', "\\|")).collect();
                out.push_str(&format!("| {} |\n", fields.join(" | ")));
            }
        }
    }
    out
}

/// Writes the cell table to `path`.
pub fn emit_report(result: &BenchResult, path: &Path, format: ReportFormat) -> std::io::Result<()> {
    if result.cells.is_empty() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "empty benchmark result",
        ));
    }
    std::fs::write(path, render_report(&result.cells, format))
}

/// One JSON object per line.
pub fn write_trial_log(trials: &[TrialLog], path: &Path) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for t in trials {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}
