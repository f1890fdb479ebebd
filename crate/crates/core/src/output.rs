//! CSV and report writers.
//!
//! Per run: one `solution_<tag>_t<time>.csv` per snapshot (header `x,q`, one
//! row per cell center at 17 significant digits) and one structured
//! `report_<tag>.json` with the config echo, a diagnostics summary and any
//! warnings. Sweeps additionally get `comparison_t<time>.csv` files with one
//! density column per sweep value for plotting overlays.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{run_tags, Scenario};
use crate::diagnostics::{
    check_max_principle, mass_balance, max_velocity_diff_residual, ConfigEcho, MaxPrincipleCheck,
    MonotonicityFlag, RunReport, MAX_PRINCIPLE_TOL,
};
use crate::error::{Error, Result};

/// Aggregated per-run diagnostics written into the report file.
#[derive(Debug, Serialize)]
struct DiagnosticsSummary {
    q_min_overall: f64,
    q_max_overall: f64,
    mass_initial: f64,
    mass_final: f64,
    mass_balance_residual: f64,
    tv_initial: Option<f64>,
    tv_final: Option<f64>,
    tv_max: Option<f64>,
    monotonicity_initial: Option<MonotonicityFlag>,
    monotonicity_final: Option<MonotonicityFlag>,
    max_velocity_diff_residual: Option<f64>,
    /// Present when the sign condition and kernel monotonicity make the
    /// maximum principle applicable.
    max_principle_passed: Option<bool>,
}

#[derive(Debug, Serialize)]
struct SnapshotEntry {
    time: f64,
    file: String,
}

#[derive(Debug, Serialize)]
struct ReportDoc<'a> {
    scenario: &'a str,
    tag: &'a str,
    config: &'a ConfigEcho,
    scenario_toml: &'a str,
    diagnostics: DiagnosticsSummary,
    snapshots: Vec<SnapshotEntry>,
    warnings: &'a [String],
}

/// Compact time tag for filenames: trailing zeros trimmed from a fixed
/// 6-decimal rendering, so t = 0.5 becomes `0.5` and t = 0 becomes `0`.
fn format_time(t: f64) -> String {
    let s = format!("{t:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|source| Error::Io {
        action: "create",
        path: path.to_path_buf(),
        source,
    })
}

fn write_io<T>(path: &Path, result: std::io::Result<T>) -> Result<T> {
    result.map_err(|source| Error::Io {
        action: "write",
        path: path.to_path_buf(),
        source,
    })
}

fn cell_centers(echo: &ConfigEcho) -> Vec<f64> {
    (0..echo.n_cells)
        .map(|j| echo.x_min + (j as f64 + 0.5) * echo.dx)
        .collect()
}

fn summarize(report: &RunReport) -> DiagnosticsSummary {
    let first = report.trace.first().expect("trace is never empty");
    let last = report.trace.last().expect("trace is never empty");
    let q_min_overall = report
        .trace
        .iter()
        .map(|r| r.min)
        .fold(f64::INFINITY, f64::min);
    let q_max_overall = report
        .trace
        .iter()
        .map(|r| r.max)
        .fold(f64::NEG_INFINITY, f64::max);
    let tv_max = report
        .trace
        .iter()
        .filter_map(|r| r.tv)
        .max_by(f64::total_cmp);
    let applicable = report.echo.diagnostics_enabled
        && report.echo.sign_condition_ok
        && report.echo.kernel_monotone;
    let max_principle_passed = applicable.then(|| {
        check_max_principle(
            report,
            report.echo.q_initial_min,
            report.echo.q_initial_max,
            MAX_PRINCIPLE_TOL,
        ) == MaxPrincipleCheck::Pass
    });
    DiagnosticsSummary {
        q_min_overall,
        q_max_overall,
        mass_initial: first.mass,
        mass_final: last.mass,
        mass_balance_residual: mass_balance(report),
        tv_initial: first.tv,
        tv_final: last.tv,
        tv_max,
        monotonicity_initial: first.monotonicity,
        monotonicity_final: last.monotonicity,
        max_velocity_diff_residual: max_velocity_diff_residual(report),
        max_principle_passed,
    }
}

/// Writes all output files for the runs of a scenario and returns their
/// paths. `reports` must be in sweep order, as returned by `run_scenario`.
pub fn write_outputs(
    scenario: &Scenario,
    reports: &[RunReport],
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        action: "create directory",
        path: out_dir.to_path_buf(),
        source,
    })?;
    let tags = run_tags(scenario);
    if tags.len() != reports.len() {
        return Err(Error::InvalidConfig(format!(
            "{} reports for {} sweep tags",
            reports.len(),
            tags.len()
        )));
    }
    let scenario_toml = scenario.echo_toml();
    let mut written = Vec::new();

    for (tag, report) in tags.iter().zip(reports) {
        let centers = cell_centers(&report.echo);
        let mut snapshot_entries = Vec::new();
        for snapshot in &report.snapshots {
            let file_name = format!("solution_{tag}_t{}.csv", format_time(snapshot.time));
            let path = out_dir.join(&file_name);
            let mut out = String::with_capacity(snapshot.q.len() * 48 + 8);
            out.push_str("x,q\n");
            for (x, q) in centers.iter().zip(&snapshot.q) {
                out.push_str(&format!("{x:.16e},{q:.16e}\n"));
            }
            write_io(&path, create(&path)?.write_all(out.as_bytes()))?;
            snapshot_entries.push(SnapshotEntry {
                time: snapshot.time,
                file: file_name,
            });
            written.push(path);
        }

        let doc = ReportDoc {
            scenario: &scenario.name,
            tag,
            config: &report.echo,
            scenario_toml: &scenario_toml,
            diagnostics: summarize(report),
            snapshots: snapshot_entries,
            warnings: &report.warnings,
        };
        let path = out_dir.join(format!("report_{tag}.json"));
        let json = serde_json::to_string_pretty(&doc)
            .map_err(|e| Error::Config(format!("report serialization failed: {e}")))?;
        write_io(&path, create(&path)?.write_all(json.as_bytes()))?;
        written.push(path);
    }

    // sweep overlays: one file per snapshot time common to all runs
    if reports.len() > 1 {
        let reference = &reports[0];
        let centers = cell_centers(&reference.echo);
        for snapshot in &reference.snapshots {
            // match other runs' snapshots within one (maximal) step
            let tol = reports
                .iter()
                .map(|r| r.echo.dt)
                .fold(f64::NEG_INFINITY, f64::max)
                + 1e-9;
            let columns: Vec<&[f64]> = reports
                .iter()
                .filter_map(|r| r.snapshot_at(snapshot.time, tol).map(|s| s.q.as_slice()))
                .collect();
            if columns.len() != reports.len() {
                continue;
            }
            let path = out_dir.join(format!("comparison_t{}.csv", format_time(snapshot.time)));
            let mut out = String::new();
            out.push('x');
            for tag in &tags {
                out.push_str(&format!(",q_{tag}"));
            }
            out.push('\n');
            for (j, x) in centers.iter().enumerate() {
                out.push_str(&format!("{x:.16e}"));
                for column in &columns {
                    out.push_str(&format!(",{:.16e}", column[j]));
                }
                out.push('\n');
            }
            write_io(&path, create(&path)?.write_all(out.as_bytes()))?;
            written.push(path);
        }
    }

    Ok(written)
}

/// Writes the refinement-study table produced by the `eoc` command.
pub fn write_eoc_csv(path: &Path, rows: &[(f64, Option<f64>, Option<f64>)]) -> Result<()> {
    let mut out = String::from("dx,l1_diff_to_next,order\n");
    for (dx, err, order) in rows {
        out.push_str(&format!("{dx:.16e}"));
        match err {
            Some(e) => out.push_str(&format!(",{e:.16e}")),
            None => out.push(','),
        }
        match order {
            Some(p) => out.push_str(&format!(",{p:.6}\n")),
            None => out.push_str(",\n"),
        }
    }
    write_io(path, create(path)?.write_all(out.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_tags_are_compact() {
        assert_eq!(format_time(0.5), "0.5");
        assert_eq!(format_time(0.0), "0");
        assert_eq!(format_time(0.25), "0.25");
        assert_eq!(format_time(0.2500000000001), "0.25");
        assert_eq!(format_time(1.0), "1");
    }
}
