//! Preference scenario: drivers blend relative density and relative velocity.
//!
//! V2(q) = α·q/q_max + (1 − α)·(1 − v(q)/v_max) with v(q) = 1 − q², and
//! V1(q) = (1 − q)². α = 1 reacts to density alone, α = 0 to velocity alone.
//! Sweeps α ∈ {0, 0.25, 0.5, 0.75, 1} from the plateau datum: the more
//! weight velocity gets, the faster the front end of the jam moves and the
//! lower its peak.
//!
//! Runs the dx = 4e-3 variant by default; pass `--full` for dx = 1e-3.

use nonlocal_fv::config::{run_scenario, run_tags, Scenario, ScenarioFile};
use nonlocal_fv::output::write_outputs;
use nonlocal_fv::Result;
use std::path::Path;

fn main() -> Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let preset = if full {
        "paper-fig2"
    } else {
        "paper-fig2-coarse"
    };
    let scenario = Scenario::resolve(ScenarioFile::preset_only(preset))?;

    println!(
        "{}: dx = {}, T = {}, sweeping alpha over {:?}",
        scenario.name,
        scenario.base.grid.dx(),
        scenario.base.final_time,
        scenario
            .sweep
            .as_ref()
            .map(|(_, v)| v.as_slice())
            .unwrap_or(&[])
    );
    let reports = run_scenario(&scenario)?;

    println!(
        "\n{:>12} {:>12} {:>16} {:>14}",
        "run", "peak q", "front (q > 0.3)", "mass residual"
    );
    for (tag, report) in run_tags(&scenario).iter().zip(&reports) {
        let snapshot = report.final_snapshot();
        let echo = &report.echo;
        let center = |j: usize| echo.x_min + (j as f64 + 0.5) * echo.dx;
        let peak = snapshot.q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let front = snapshot
            .q
            .iter()
            .enumerate()
            .filter(|(_, &q)| q > 0.3)
            .map(|(j, _)| center(j))
            .fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{tag:>12} {peak:>12.6} {front:>16.4} {:>14.3e}",
            nonlocal_fv::diagnostics::mass_balance(report)
        );
    }

    let out = Path::new("out").join("fig2");
    let files = write_outputs(&scenario, &reports, &out)?;
    println!("\nwrote {} files to {}", files.len(), out.display());
    Ok(())
}
