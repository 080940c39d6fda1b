//! Verification-suite harness behind the `tubegeom` binary.
//!
//! Each suite is a list of numbered cases with a metric and a tolerance;
//! a case passes when `metric ≤ tol`. Settings come from built-in defaults,
//! an optional TOML file and command-line flags, in that order.

pub mod config;
pub mod error;
pub mod report;
pub mod suites;

use std::path::Path;

pub use config::{ConfigFile, Overrides, SuiteConfig};
pub use error::{CliError, CliResult};
pub use report::{Format, ReportRecord, Status};
pub use suites::{run_suite, Suite, SuiteOutput, Tables};

pub const CURVATURE_TABLE: &str = "curvature_table.csv";
pub const RESIDUAL_TABLE: &str = "residual_vs_eps.csv";

/// Resolves settings for each suite and runs them in registry order.
pub fn run_all(
    suites: &[Suite],
    file: Option<&ConfigFile>,
    flags: &Overrides,
    timing: bool,
) -> CliResult<SuiteOutput> {
    let configs = suites
        .iter()
        .map(|&s| config::resolve(s, file, flags, timing))
        .collect::<CliResult<Vec<_>>>()?;
    let mut records = Vec::new();
    let mut tables = Tables::default();
    for cfg in &configs {
        let out = run_suite(cfg)?;
        records.extend(out.records);
        tables.curvature = tables.curvature.or(out.tables.curvature);
        tables.residual_vs_eps = tables.residual_vs_eps.or(out.tables.residual_vs_eps);
    }
    Ok(SuiteOutput { records, tables })
}

/// Writes `report.{json,csv}` and any tables into `dir`.
pub fn write_outputs(dir: &Path, output: &SuiteOutput, format: Format) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    let report = report::render(&output.records, format)?;
    std::fs::write(dir.join(format!("report.{}", format.extension())), report)?;
    if let Some(t) = &output.tables.curvature {
        std::fs::write(dir.join(CURVATURE_TABLE), t)?;
    }
    if let Some(t) = &output.tables.residual_vs_eps {
        std::fs::write(dir.join(RESIDUAL_TABLE), t)?;
    }
    Ok(())
}
