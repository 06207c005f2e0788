//! Verification reports and their JSON, CSV and text renderings.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::LabError;

/// Fixed CSV header.
pub const CSV_HEADER: &str = "suite,case,expected,actual,abs_err,rel_err,tolerance,pass,runtime_ms,seed";

/// Expected value of a case: exact integers stay integers in every format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expected {
    Integer(i64),
    Real(f64),
}

impl Expected {
    pub fn value(self) -> f64 {
        match self {
            Expected::Integer(i) => i as f64,
            Expected::Real(x) => x,
        }
    }
}

impl From<i64> for Expected {
    fn from(v: i64) -> Self {
        Expected::Integer(v)
    }
}

impl From<f64> for Expected {
    fn from(v: f64) -> Self {
        Expected::Real(v)
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Integer(i) => write!(f, "{i}"),
            Expected::Real(x) => write!(f, "{x:?}"),
        }
    }
}

/// Which error a case's tolerance applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Absolute,
    Relative,
    /// Passes when either error is within tolerance.
    Either,
}

/// One checked quantity.
///
/// `rel_err` is `abs_err / |expected|`, or `abs_err` when the expected value
/// is zero. `runtime_ms` is zero unless timings were requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub case: String,
    pub expected: Expected,
    pub actual: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: u64,
    pub seed: u64,
}

impl VerificationReport {
    pub fn new(suite: &str, case: impl Into<String>, expected: impl Into<Expected>, actual: f64, tolerance: f64, policy: Policy, seed: u64) -> Self {
        let expected = expected.into();
        let e = expected.value();
        let abs_err = (actual - e).abs();
        let rel_err = if e == 0.0 { abs_err } else { abs_err / e.abs() };
        let pass = match policy {
            Policy::Absolute => abs_err <= tolerance,
            Policy::Relative => rel_err <= tolerance,
            Policy::Either => abs_err <= tolerance || rel_err <= tolerance,
        };
        Self {
            suite: suite.to_string(),
            case: case.into(),
            expected,
            actual,
            abs_err,
            rel_err,
            tolerance,
            pass,
            runtime_ms: 0,
            seed,
        }
    }

    pub fn with_runtime(mut self, ms: u64) -> Self {
        self.runtime_ms = ms;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Text,
}

/// Sorts reports by `(suite, case)`.
pub fn canonical_order(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| (&a.suite, &a.case).cmp(&(&b.suite, &b.case)));
}

pub fn to_json(reports: &[VerificationReport]) -> Result<String, LabError> {
    let mut s = serde_json::to_string_pretty(reports).map_err(|e| LabError::Usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Vec<VerificationReport>, LabError> {
    serde_json::from_str(text).map_err(|e| LabError::Usage(format!("malformed report JSON: {e}")))
}

pub fn to_csv(reports: &[VerificationReport]) -> Result<String, LabError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).map_err(|e| LabError::Usage(e.to_string()))?;
    for r in reports {
        w.write_record([
            r.suite.clone(),
            r.case.clone(),
            r.expected.to_string(),
            format!("{:?}", r.actual),
            format!("{:?}", r.abs_err),
            format!("{:?}", r.rel_err),
            format!("{:?}", r.tolerance),
            r.pass.to_string(),
            r.runtime_ms.to_string(),
            r.seed.to_string(),
        ])
        .map_err(|e| LabError::Usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| LabError::Usage(e.to_string()))
}

/// Plain table followed by `N passed / M total`.
pub fn to_text(reports: &[VerificationReport], extra: &[String]) -> String {
    let width = reports.iter().map(|r| r.suite.len() + r.case.len() + 1).max().unwrap_or(0);
    let mut out = String::new();
    for r in reports {
        let name = format!("{}/{}", r.suite, r.case);
        out.push_str(&format!(
            "{} {name:<width$}  expected {:<24} actual {:<24.17e} abs {:.2e} rel {:.2e} tol {:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.expected.to_string(),
            r.actual,
            r.abs_err,
            r.rel_err,
            r.tolerance,
        ));
        if r.runtime_ms > 0 {
            out.push_str(&format!(" {} ms", r.runtime_ms));
        }
        out.push('\n');
    }
    for block in extra {
        out.push('\n');
        out.push_str(block);
        if !block.ends_with('\n') {
            out.push('\n');
        }
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    out.push_str(&format!("{passed} passed / {} total\n", reports.len()));
    out
}

/// Renders and writes the reports to `path`, or stdout when `path` is `None`.
pub fn emit_report(reports: &[VerificationReport], extra: &[String], format: Format, path: Option<&std::path::Path>) -> Result<(), LabError> {
    if reports.is_empty() {
        return Err(LabError::Usage("no reports to emit".into()));
    }
    let text = match format {
        Format::Json => to_json(reports)?,
        Format::Csv => to_csv(reports)?,
        Format::Text => to_text(reports, extra),
    };
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| LabError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| LabError::Io(e.to_string()))
        }
    }
}
