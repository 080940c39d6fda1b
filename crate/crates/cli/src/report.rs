use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// One checked case of a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub suite: String,
    pub case: String,
    pub status: Status,
    pub metric: f64,
    pub tol: f64,
    pub ms: u64,
    pub note: String,
}

impl ReportRecord {
    /// Passes iff `metric ≤ tol`. Non-finite metrics fail with `f64::MAX`.
    pub fn check(suite: &str, case: &str, metric: f64, tol: f64, note: String) -> Self {
        let metric = if metric.is_finite() { metric } else { f64::MAX };
        let status = if metric <= tol {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            suite: suite.to_string(),
            case: case.to_string(),
            status,
            metric,
            tol,
            ms: 0,
            note,
        }
    }

    pub fn skip(suite: &str, case: &str, tol: f64, note: String) -> Self {
        Self {
            suite: suite.to_string(),
            case: case.to_string(),
            status: Status::Skip,
            metric: 0.0,
            tol,
            ms: 0,
            note,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

pub fn render(records: &[ReportRecord], format: Format) -> CliResult<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(records)
                .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in records {
                w.serialize(r)
                    .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            Ok(String::from_utf8_lossy(&bytes).into_owned())
        }
    }
}

pub fn any_failed(records: &[ReportRecord]) -> bool {
    records.iter().any(|r| r.status == Status::Fail)
}

/// `pass/fail/skip` counts.
pub fn summary(records: &[ReportRecord]) -> (usize, usize, usize) {
    let count = |s| records.iter().filter(|r| r.status == s).count();
    (
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Skip),
    )
}
