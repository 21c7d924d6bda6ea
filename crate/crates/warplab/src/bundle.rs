//! Report bundles, exit status, and table/CSV rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use warplab_core::report::{Verdict, VerificationReport};

use crate::error::{Error, Result};

/// Fixed header of the report CSV.
pub const REPORT_HEADER: [&str; 9] = [
    "check_id",
    "scenario",
    "lhs",
    "rhs",
    "margin",
    "ci_low",
    "ci_high",
    "fitted_constants",
    "verdict",
];

/// Process exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    Fail = 1,
    ConfigError = 2,
    Inconclusive = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// One fitted constant with the data it was fitted on and verified against.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedConstant {
    pub name: String,
    pub value: f64,
    pub calibration: String,
    pub held_out: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub seed: u64,
    pub grid: String,
    pub simulation: String,
    pub fitted: Vec<FittedConstant>,
}

/// Columnar data for an external plot.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    /// File stem of the emitted CSV.
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub scenario: String,
    pub suite: String,
    pub reports: Vec<VerificationReport>,
    pub plots: Vec<PlotData>,
    pub provenance: Provenance,
}

impl ReportBundle {
    /// 1 on any failure, else 3 on any unresolved statistical verdict, else 0.
    pub fn exit_status(&self) -> ExitStatus {
        let failed = self
            .reports
            .iter()
            .any(|r| matches!(r.verdict, Verdict::Fail | Verdict::UnexpectedPass));
        let unresolved = self
            .reports
            .iter()
            .any(|r| matches!(r.verdict, Verdict::Inconclusive | Verdict::Unreliable));
        if failed {
            ExitStatus::Fail
        } else if unresolved {
            ExitStatus::Inconclusive
        } else {
            ExitStatus::Pass
        }
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.reports.iter().filter(|r| r.verdict == verdict).count()
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn fitted(r: &VerificationReport) -> String {
    r.fitted
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Report rows as CSV text, header first.
pub fn reports_csv(bundle: &ReportBundle) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_HEADER)?;
    for r in &bundle.reports {
        w.write_record([
            r.check_id.clone(),
            r.scenario.clone(),
            num(r.lhs),
            num(r.rhs),
            num(r.margin),
            num(r.ci_low),
            num(r.ci_high),
            fitted(r),
            r.verdict.as_str().to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn plot_csv(plot: &PlotData) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&plot.header)?;
    for row in &plot.rows {
        w.write_record(row.iter().map(|&x| num(x)))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn provenance_text(bundle: &ReportBundle) -> String {
    let p = &bundle.provenance;
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", bundle.scenario);
    let _ = writeln!(s, "suite: {}", bundle.suite);
    let _ = writeln!(s, "seed: {}", p.seed);
    let _ = writeln!(s, "grid: {}", p.grid);
    let _ = writeln!(s, "simulation: {}", p.simulation);
    for f in &p.fitted {
        let _ = writeln!(
            s,
            "fitted {} = {} | calibration: {} | held-out: {}",
            f.name, f.value, f.calibration, f.held_out
        );
    }
    s
}

/// Fixed-width table with a verdict summary and the provenance block.
pub fn render_table(bundle: &ReportBundle) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<34} {:<15} {:>13} {:>13} {:>13}  note",
        "check_id", "verdict", "lhs", "rhs", "margin"
    );
    for r in &bundle.reports {
        let _ = writeln!(
            s,
            "{:<34} {:<15} {:>13.6e} {:>13.6e} {:>13.6e}  {}",
            r.check_id,
            r.verdict.as_str(),
            r.lhs,
            r.rhs,
            r.margin,
            r.note
        );
    }
    let _ = writeln!(
        s,
        "\n{} checks: {} pass, {} expected_fail, {} skipped, {} fail, {} inconclusive, {} unreliable, {} unexpected_pass",
        bundle.reports.len(),
        bundle.count(Verdict::Pass),
        bundle.count(Verdict::ExpectedFail),
        bundle.count(Verdict::Skipped),
        bundle.count(Verdict::Fail),
        bundle.count(Verdict::Inconclusive),
        bundle.count(Verdict::Unreliable),
        bundle.count(Verdict::UnexpectedPass),
    );
    s.push('\n');
    s.push_str(&provenance_text(bundle));
    s
}

fn write_file(path: PathBuf, text: &str) -> Result<()> {
    fs::write(&path, text).map_err(|source| Error::Io { path, source })
}

/// Writes `reports.csv`, one CSV per plot, and `provenance.txt` into `dir`.
/// Returns the written paths in order.
pub fn write_outputs(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let path = dir.join("reports.csv");
    write_file(path.clone(), &reports_csv(bundle)?)?;
    written.push(path);
    for plot in &bundle.plots {
        let path = dir.join(format!("{}.csv", plot.name));
        write_file(path.clone(), &plot_csv(plot)?)?;
        written.push(path);
    }
    let path = dir.join("provenance.txt");
    write_file(path.clone(), &provenance_text(bundle))?;
    written.push(path);
    Ok(written)
}
