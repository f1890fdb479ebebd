//! Run-time scheme diagnostics and the grid-refinement harness.
//!
//! The scheme comes with proved discrete properties — the maximum principle,
//! the velocity-difference estimate inside its proof, conservation up to
//! boundary fluxes, and monotonicity preservation under curvature-restricted
//! V1. This module turns each of them into a measurable check over the
//! per-step trace a run records, and adds the standard experimental-order
//! (EOC) harness for refinement studies.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::State;
use crate::numeric::kahan_sum;

/// Tolerance for the discrete maximum principle: the bound is exact in real
/// arithmetic; 1e-12 absorbs per-step rounding over thousands of steps.
pub const MAX_PRINCIPLE_TOL: f64 = 1e-12;

/// Tolerance for the per-step velocity-difference estimate
/// V_{j−1} − V_j ≤ ‖V1′‖·‖V2′‖·γ₀·(q_M − q_j).
pub const VELOCITY_DIFF_TOL: f64 = 1e-12;

/// Tolerance for the relative mass-balance residual of a conservative run.
pub const MASS_BALANCE_TOL: f64 = 1e-10;

/// Tolerance for adjacent-pair comparisons in the monotonicity flag.
pub const MONOTONICITY_TOL: f64 = 1e-12;

/// Direction of a state profile under adjacent-difference scan.
///
/// Constant states satisfy both directions and report `NonDecreasing` by
/// convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MonotonicityFlag {
    NonDecreasing,
    NonIncreasing,
    Neither,
}

/// One recorded state of a run.
#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub time: f64,
    pub q: Vec<f64>,
}

/// Per-step diagnostic record. `tv`, `monotonicity` and `vdiff_residual` are
/// present only when the run had diagnostics enabled; `vdiff_residual` is
/// additionally absent on the initial record (there is no step behind it).
#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub time: f64,
    pub min: f64,
    pub argmin: usize,
    pub max: f64,
    pub argmax: usize,
    /// Σ_j q_j · Δx at this step.
    pub mass: f64,
    /// Accumulated inflow Σ Δt·q_in·V_in through the left boundary so far.
    pub inflow_cum: f64,
    /// Accumulated outflow Σ Δt·q_out·V_out through the right boundary so far.
    pub outflow_cum: f64,
    pub tv: Option<f64>,
    pub monotonicity: Option<MonotonicityFlag>,
    pub vdiff_residual: Option<f64>,
}

/// Echo of the numbers a run actually used; written into reports so results
/// are reproducible from the report alone.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub n_cells: usize,
    pub final_time: f64,
    pub lambda: f64,
    pub dt: f64,
    pub gamma_0: f64,
    pub n_eta: usize,
    pub steps: usize,
    /// Initial range [q_m, q_M] including ghosts; the maximum-principle bounds.
    pub q_initial_min: f64,
    pub q_initial_max: f64,
    /// ‖V1‖ over the V2-image of the initial range.
    pub sup_v1_abs: f64,
    /// ‖V1′‖ over the V2-image of the initial range.
    pub sup_v1_deriv: f64,
    /// ‖V2′‖ over the initial range.
    pub sup_v2_deriv: f64,
    pub v1: String,
    pub v2: String,
    pub kernel: String,
    pub nonlocal_path: String,
    pub sign_condition_ok: bool,
    pub kernel_monotone: bool,
    pub diagnostics_enabled: bool,
}

/// Snapshots plus diagnostic traces of one solver run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub snapshots: Vec<Snapshot>,
    /// One record per state: trace.len() == steps + 1.
    pub trace: Vec<TraceRecord>,
    pub echo: ConfigEcho,
    pub warnings: Vec<String>,
}

impl RunReport {
    /// Snapshot closest to the requested time within `tol`, if any.
    pub fn snapshot_at(&self, time: f64, tol: f64) -> Option<&Snapshot> {
        self.snapshots
            .iter()
            .filter(|s| (s.time - time).abs() <= tol)
            .min_by(|a, b| (a.time - time).abs().total_cmp(&(b.time - time).abs()))
    }

    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots.last().expect("a run always has snapshots")
    }
}

/// Discrete total variation: Σ_j |q_{j+1} − q_j| over the interior plus the
/// jumps to both ghost values, matching the whole-line BV seminorm of the
/// extended state.
pub fn total_variation(state: &State) -> f64 {
    let q = state.interior();
    if q.is_empty() {
        return 0.0;
    }
    let mut tv = (q[0] - state.ghost_left()).abs();
    for pair in q.windows(2) {
        tv += (pair[1] - pair[0]).abs();
    }
    tv + (state.ghost_right() - q[q.len() - 1]).abs()
}

/// Adjacent-difference scan of the interior with tolerance `tol` per pair.
pub fn monotonicity_flag(state: &State, tol: f64) -> MonotonicityFlag {
    let mut non_decreasing = true;
    let mut non_increasing = true;
    for pair in state.interior().windows(2) {
        let d = pair[1] - pair[0];
        if d < -tol {
            non_decreasing = false;
        }
        if d > tol {
            non_increasing = false;
        }
        if !non_decreasing && !non_increasing {
            return MonotonicityFlag::Neither;
        }
    }
    if non_decreasing {
        MonotonicityFlag::NonDecreasing
    } else {
        MonotonicityFlag::NonIncreasing
    }
}

/// Result of scanning a run against the discrete maximum principle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MaxPrincipleCheck {
    Pass,
    /// First violation: step index, cell index, offending value.
    Fail {
        step: usize,
        cell: usize,
        value: f64,
    },
}

impl MaxPrincipleCheck {
    pub fn passed(&self) -> bool {
        matches!(self, MaxPrincipleCheck::Pass)
    }
}

/// Scans the whole trace for q_m − tol ≤ q_j ≤ q_M + tol.
pub fn check_max_principle(
    report: &RunReport,
    q_min: f64,
    q_max: f64,
    tol: f64,
) -> MaxPrincipleCheck {
    for (step, record) in report.trace.iter().enumerate() {
        if record.min < q_min - tol {
            return MaxPrincipleCheck::Fail {
                step,
                cell: record.argmin,
                value: record.min,
            };
        }
        if record.max > q_max + tol {
            return MaxPrincipleCheck::Fail {
                step,
                cell: record.argmax,
                value: record.max,
            };
        }
    }
    MaxPrincipleCheck::Pass
}

/// Relative conservation residual of a completed run:
///
///   |mass_N − mass_0 − (inflow − outflow)| / max(1, mass_0).
///
/// The conservative update telescopes, so this is rounding-level for any
/// correct run regardless of what the solution does.
pub fn mass_balance(report: &RunReport) -> f64 {
    let first = report.trace.first().expect("trace is never empty");
    let last = report.trace.last().expect("trace is never empty");
    let drift = last.mass - first.mass - (last.inflow_cum - last.outflow_cum);
    drift.abs() / first.mass.abs().max(1.0)
}

/// Largest velocity-difference residual over all steps of a run, or None if
/// the run recorded no residuals (diagnostics off).
pub fn max_velocity_diff_residual(report: &RunReport) -> Option<f64> {
    report
        .trace
        .iter()
        .filter_map(|r| r.vdiff_residual)
        .max_by(f64::total_cmp)
}

/// Experimental order of convergence from three runs at Δx, Δx/2, Δx/4.
///
/// Finer solutions are restricted to the coarser cells by averaging, the two
/// successive L¹ differences e₁ = ‖coarse − mid‖, e₂ = ‖mid − fine‖ are
/// formed, and the estimate is log₂(e₁/e₂). All runs must carry a snapshot at
/// the comparison time t*.
pub fn eoc(coarse: &RunReport, mid: &RunReport, fine: &RunReport, t_star: f64) -> Result<f64> {
    check_refinement_pair(&coarse.echo, &mid.echo)?;
    check_refinement_pair(&mid.echo, &fine.echo)?;
    let e1 = l1_restricted_distance(coarse, mid, t_star)?;
    let e2 = l1_restricted_distance(mid, fine, t_star)?;
    if e1 == 0.0 || e2 == 0.0 {
        return Err(Error::UndefinedOrder(format!(
            "refinement errors are degenerate: e1 = {e1}, e2 = {e2}"
        )));
    }
    Ok((e1 / e2).log2())
}

fn check_refinement_pair(coarse: &ConfigEcho, fine: &ConfigEcho) -> Result<()> {
    if (coarse.x_min - fine.x_min).abs() > 1e-12 || (coarse.x_max - fine.x_max).abs() > 1e-12 {
        return Err(Error::IncompatibleRuns(format!(
            "domains differ: [{}, {}] vs [{}, {}]",
            coarse.x_min, coarse.x_max, fine.x_min, fine.x_max
        )));
    }
    let ratio = coarse.dx / fine.dx;
    if (ratio - 2.0).abs() > 1e-9 {
        return Err(Error::IncompatibleRuns(format!(
            "dx ratio must be 2, got {ratio}"
        )));
    }
    Ok(())
}

/// L¹ distance between a coarse run and a 2x finer run restricted (by cell
/// averaging) to the coarse grid, both taken at time t*.
pub fn l1_restricted_distance(coarse: &RunReport, fine: &RunReport, t_star: f64) -> Result<f64> {
    let tol = 1e-9 * t_star.abs().max(1.0);
    let qc = &coarse
        .snapshot_at(t_star, tol)
        .ok_or_else(|| {
            Error::IncompatibleRuns(format!("coarse run has no snapshot at t = {t_star}"))
        })?
        .q;
    let qf = &fine
        .snapshot_at(t_star, tol)
        .ok_or_else(|| {
            Error::IncompatibleRuns(format!("fine run has no snapshot at t = {t_star}"))
        })?
        .q;
    if qf.len() != 2 * qc.len() {
        return Err(Error::IncompatibleRuns(format!(
            "cell counts {} and {} are not nested 1:2",
            qc.len(),
            qf.len()
        )));
    }
    let dx = coarse.echo.dx;
    let diffs: Vec<f64> = qc
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let restricted = 0.5 * (qf[2 * j] + qf[2 * j + 1]);
            (c - restricted).abs() * dx
        })
        .collect();
    Ok(kahan_sum(&diffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::State;

    fn echo(dx: f64, n_cells: usize) -> ConfigEcho {
        ConfigEcho {
            x_min: 0.0,
            x_max: dx * n_cells as f64,
            dx,
            n_cells,
            final_time: 1.0,
            lambda: 1.0,
            dt: dx,
            gamma_0: 0.1,
            n_eta: 1,
            steps: 0,
            q_initial_min: 0.0,
            q_initial_max: 1.0,
            sup_v1_abs: 1.0,
            sup_v1_deriv: 1.0,
            sup_v2_deriv: 1.0,
            v1: "test".into(),
            v2: "test".into(),
            kernel: "test".into(),
            nonlocal_path: "naive".into(),
            sign_condition_ok: true,
            kernel_monotone: true,
            diagnostics_enabled: true,
        }
    }

    fn record(min: f64, max: f64, mass: f64) -> TraceRecord {
        TraceRecord {
            time: 0.0,
            min,
            argmin: 0,
            max,
            argmax: 0,
            mass,
            inflow_cum: 0.0,
            outflow_cum: 0.0,
            tv: None,
            monotonicity: None,
            vdiff_residual: None,
        }
    }

    fn report_with_snapshots(dx: f64, snaps: Vec<(f64, Vec<f64>)>) -> RunReport {
        let n = snaps[0].1.len();
        RunReport {
            snapshots: snaps
                .into_iter()
                .map(|(time, q)| Snapshot { time, q })
                .collect(),
            trace: vec![record(0.0, 1.0, 1.0)],
            echo: echo(dx, n),
            warnings: vec![],
        }
    }

    #[test]
    fn total_variation_examples() {
        // constant state with matching ghosts
        let c = State::new(vec![0.4; 8], 0.4, 0.4, 0.0);
        assert_eq!(total_variation(&c), 0.0);

        // plateau datum: two jumps of 0.5 each
        let plateau = State::new(vec![0.25, 0.25, 0.75, 0.75, 0.25, 0.25], 0.25, 0.25, 0.0);
        assert!((total_variation(&plateau) - 1.0).abs() < 1e-15);

        // monotone ramp with matching ghosts telescopes to |b - a|
        let ramp = State::new(vec![0.1, 0.2, 0.5, 0.8], 0.1, 0.8, 0.0);
        assert!((total_variation(&ramp) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn monotonicity_flag_examples() {
        let s = |q: Vec<f64>| State::new(q, 0.0, 0.0, 0.0);
        assert_eq!(
            monotonicity_flag(&s(vec![0.1, 0.1, 0.3]), 1e-12),
            MonotonicityFlag::NonDecreasing
        );
        assert_eq!(
            monotonicity_flag(&s(vec![0.3, 0.1, 0.3]), 1e-12),
            MonotonicityFlag::Neither
        );
        // constant reports NonDecreasing by convention
        assert_eq!(
            monotonicity_flag(&s(vec![0.2, 0.2, 0.2]), 0.0),
            MonotonicityFlag::NonDecreasing
        );
        assert_eq!(
            monotonicity_flag(&s(vec![0.5, 0.4, 0.1]), 1e-12),
            MonotonicityFlag::NonIncreasing
        );
    }

    #[test]
    fn max_principle_scan_finds_injected_violation() {
        let mut report = report_with_snapshots(0.1, vec![(0.0, vec![0.5; 4])]);
        report.trace = vec![record(0.25, 0.75, 1.0), record(0.25, 0.75, 1.0), {
            let mut r = record(0.25, 1.5, 1.0);
            r.argmax = 7;
            r
        }];
        match check_max_principle(&report, 0.25, 0.75, 1e-12) {
            MaxPrincipleCheck::Fail { step, cell, value } => {
                assert_eq!(step, 2);
                assert_eq!(cell, 7);
                assert_eq!(value, 1.5);
            }
            MaxPrincipleCheck::Pass => panic!("injected violation not found"),
        }

        report.trace.pop();
        assert!(check_max_principle(&report, 0.25, 0.75, 0.0).passed());
    }

    #[test]
    fn mass_balance_of_synthetic_conservative_trace() {
        let mut report = report_with_snapshots(0.1, vec![(0.0, vec![0.5; 4])]);
        let mut start = record(0.25, 0.75, 2.0);
        start.inflow_cum = 0.0;
        start.outflow_cum = 0.0;
        let mut end = record(0.25, 0.75, 2.25);
        end.inflow_cum = 0.75;
        end.outflow_cum = 0.5;
        report.trace = vec![start, end];
        assert!(mass_balance(&report) < 1e-15);
    }

    #[test]
    fn eoc_of_manufactured_first_order_family() {
        // synthetic solutions u_dx = x + dx on [0, 1): restriction averages
        // exactly, e1 = dx, e2 = dx/2, order = 1
        let make = |dx: f64| {
            let n = (1.0 / dx).round() as usize;
            let q: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * dx + dx).collect();
            report_with_snapshots(dx, vec![(0.5, q)])
        };
        let coarse = make(0.125);
        let mid = make(0.0625);
        let fine = make(0.03125);
        let order = eoc(&coarse, &mid, &fine, 0.5).unwrap();
        assert!((order - 1.0).abs() < 1e-10, "order = {order}");
    }

    #[test]
    fn projection_cannot_increase_total_variation() {
        use crate::grid::{project_initial, Grid1D, InitialDatum};
        let datum =
            InitialDatum::piecewise_constant(vec![-0.7, 0.1, 0.4], vec![0.3, 0.9, 0.1, 0.5])
                .unwrap();
        // datum TV: |0.9-0.3| + |0.1-0.9| + |0.5-0.1| = 1.8
        let datum_tv = 0.6 + 0.8 + 0.4;
        for dx in [0.5, 0.25, 0.125, 0.0625] {
            let grid = Grid1D::new(-2.0, 2.0, dx).unwrap();
            let state = project_initial(&datum, &grid).unwrap();
            let tv = total_variation(&state);
            assert!(tv <= datum_tv + 1e-12, "dx = {dx}: tv {tv} > {datum_tv}");
        }
    }

    #[test]
    fn eoc_is_invariant_under_run_construction_order() {
        let make = |dx: f64| {
            let n = (1.0 / dx).round() as usize;
            let q: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * dx + dx).collect();
            report_with_snapshots(dx, vec![(0.5, q)])
        };
        // construct the three runs in both orders; the estimate is a pure
        // function of the reports and must agree bitwise
        let (a, b, c) = (make(0.125), make(0.0625), make(0.03125));
        let forward = eoc(&a, &b, &c, 0.5).unwrap();
        let (c2, b2, a2) = (make(0.03125), make(0.0625), make(0.125));
        let backward = eoc(&a2, &b2, &c2, 0.5).unwrap();
        assert_eq!(forward.to_bits(), backward.to_bits());
    }

    #[test]
    fn eoc_identical_runs_is_undefined() {
        let make = |dx: f64| {
            let n = (1.0 / dx).round() as usize;
            report_with_snapshots(dx, vec![(0.5, vec![0.4; n])])
        };
        let err = eoc(&make(0.125), &make(0.0625), &make(0.03125), 0.5);
        assert!(matches!(err, Err(Error::UndefinedOrder(_))));
    }

    #[test]
    fn eoc_rejects_mismatched_families() {
        let a = report_with_snapshots(0.125, vec![(0.5, vec![0.4; 8])]);
        let b = report_with_snapshots(0.1, vec![(0.5, vec![0.5; 10])]);
        let c = report_with_snapshots(0.05, vec![(0.5, vec![0.6; 20])]);
        assert!(matches!(
            eoc(&a, &b, &c, 0.5),
            Err(Error::IncompatibleRuns(_))
        ));
    }
}
