//! Density-estimation scenario: drivers misjudge the density ahead.
//!
//! V2(q) = q + ε·q·(1 − q) maps the true density to the estimated one
//! (ε < 0 underestimates, ε > 0 overestimates, ε = 0 is exact knowledge) and
//! V1(q) = 1 − q² turns the kernel average of the estimate into a velocity.
//! Sweeps ε ∈ {−0.5, 0, 0.5} from the plateau datum and writes solution and
//! comparison CSVs. Underestimation should pile the density higher and carry
//! it further downstream.
//!
//! Runs the dx = 4e-3 variant by default; pass `--full` for dx = 1e-3.

use nonlocal_fv::config::{run_scenario, run_tags, Scenario, ScenarioFile};
use nonlocal_fv::output::write_outputs;
use nonlocal_fv::Result;
use std::path::Path;

fn main() -> Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let preset = if full {
        "paper-fig1"
    } else {
        "paper-fig1-coarse"
    };
    let scenario = Scenario::resolve(ScenarioFile::preset_only(preset))?;

    println!(
        "{}: dx = {}, T = {}, sweeping eps over {:?}",
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
        "\n{:>10} {:>12} {:>12} {:>14}",
        "run", "max q", "at x", "mass residual"
    );
    for (tag, report) in run_tags(&scenario).iter().zip(&reports) {
        let snapshot = report.final_snapshot();
        let echo = &report.echo;
        let (j, max_q) = snapshot
            .q
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(j, &q)| (j, q))
            .unwrap();
        let x = echo.x_min + (j as f64 + 0.5) * echo.dx;
        println!(
            "{tag:>10} {max_q:>12.6} {x:>12.4} {:>14.3e}",
            nonlocal_fv::diagnostics::mass_balance(report)
        );
    }

    let out = Path::new("out").join("fig1");
    let files = write_outputs(&scenario, &reports, &out)?;
    println!("\nwrote {} files to {}", files.len(), out.display());
    println!(
        "plot the overlay from {}",
        out.join("comparison_t0.5.csv").display()
    );
    Ok(())
}
