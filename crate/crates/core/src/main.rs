//! Thin command-line front end over the library: `simulate` runs a scenario
//! (config file or preset) and writes CSV/JSON outputs, `eoc` runs a
//! grid-refinement study. Exits nonzero if any enabled diagnostic fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nonlocal_fv::config::{
    run_scenario, run_tags, DiagSpec, PathSpec, Scenario, ScenarioFile, SweepSpec,
};
use nonlocal_fv::diagnostics::{
    check_max_principle, eoc, mass_balance, max_velocity_diff_residual, MaxPrincipleCheck,
    RunReport, MASS_BALANCE_TOL, MAX_PRINCIPLE_TOL, VELOCITY_DIFF_TOL,
};
use nonlocal_fv::output::{write_eoc_csv, write_outputs};
use nonlocal_fv::{Error, Result};

#[derive(Parser)]
#[command(
    name = "nonlocal-fv",
    about = "Finite-volume solver for 1-D conservation laws with a nonlocal velocity",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write solution CSVs plus a JSON report per run.
    Simulate {
        /// Scenario config file (TOML). Omit when using --preset.
        config: Option<PathBuf>,
        /// Built-in scenario: paper-fig1[-coarse] or paper-fig2[-coarse].
        #[arg(long)]
        preset: Option<String>,
        /// Override the sweep axis, e.g. --sweep eps=-0.5,0,0.5
        #[arg(long, value_name = "KEY=V1,V2,...")]
        sweep: Option<String>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Nonlocal evaluation path.
        #[arg(long, value_parser = ["naive", "fast", "both"])]
        path: Option<String>,
        /// Per-step diagnostics.
        #[arg(long, value_parser = ["all", "off"])]
        diag: Option<String>,
    },
    /// Refinement study: run at dx, dx/2, ... and report the observed order.
    Eoc {
        /// Scenario config file (TOML). Omit when using --preset.
        config: Option<PathBuf>,
        /// Built-in scenario name.
        #[arg(long)]
        preset: Option<String>,
        /// Number of refinement levels (at least 3).
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load_file(config: Option<PathBuf>, preset: Option<String>) -> Result<ScenarioFile> {
    match (config, preset) {
        (Some(path), None) => ScenarioFile::from_path(&path),
        (None, Some(name)) => Ok(ScenarioFile::preset_only(&name)),
        (Some(path), Some(name)) => {
            let mut file = ScenarioFile::from_path(&path)?;
            file.preset = Some(name);
            Ok(file)
        }
        (None, None) => Err(Error::Config("pass a config file or --preset NAME".into())),
    }
}

fn parse_sweep_flag(flag: &str) -> Result<SweepSpec> {
    let (key, list) = flag
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--sweep expects KEY=V1,V2,..., got `{flag}`")))?;
    let values = list
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{v}` is not a number in --sweep")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SweepSpec {
        key: key.trim().to_string(),
        values,
    })
}

/// Evaluates the enabled diagnostics of one run, printing one line per check.
/// Returns false if any enabled check fails.
fn diagnostics_pass(tag: &str, report: &RunReport) -> bool {
    let mut ok = true;
    if !report.echo.diagnostics_enabled {
        println!("[{tag}] diagnostics off");
        return true;
    }

    let residual = mass_balance(report);
    let mass_ok = residual < MASS_BALANCE_TOL;
    ok &= mass_ok;
    println!(
        "[{tag}] mass balance: {} (residual {residual:.3e}, tol {MASS_BALANCE_TOL:.0e})",
        if mass_ok { "PASS" } else { "FAIL" }
    );

    if report.echo.sign_condition_ok && report.echo.kernel_monotone {
        let check = check_max_principle(
            report,
            report.echo.q_initial_min,
            report.echo.q_initial_max,
            MAX_PRINCIPLE_TOL,
        );
        match check {
            MaxPrincipleCheck::Pass => println!(
                "[{tag}] maximum principle: PASS ([{:.6}, {:.6}], tol {MAX_PRINCIPLE_TOL:.0e})",
                report.echo.q_initial_min, report.echo.q_initial_max
            ),
            MaxPrincipleCheck::Fail { step, cell, value } => {
                ok = false;
                println!(
                    "[{tag}] maximum principle: FAIL at step {step}, cell {cell}: q = {value}"
                );
            }
        }
        if let Some(worst) = max_velocity_diff_residual(report) {
            let vdiff_ok = worst <= VELOCITY_DIFF_TOL;
            ok &= vdiff_ok;
            println!(
                "[{tag}] velocity-difference estimate: {} (max residual {worst:.3e}, tol {VELOCITY_DIFF_TOL:.0e})",
                if vdiff_ok { "PASS" } else { "FAIL" }
            );
        }
    } else {
        println!(
            "[{tag}] maximum principle: not applicable (sign condition {}, kernel monotone {})",
            report.echo.sign_condition_ok, report.echo.kernel_monotone
        );
    }

    for warning in &report.warnings {
        println!("[{tag}] warning: {warning}");
    }
    ok
}

fn simulate(
    config: Option<PathBuf>,
    preset: Option<String>,
    sweep: Option<String>,
    out: PathBuf,
    path: Option<String>,
    diag: Option<String>,
) -> Result<bool> {
    let mut file = load_file(config, preset)?;
    if let Some(flag) = &sweep {
        file.sweep = Some(parse_sweep_flag(flag)?);
        // a sweep flag beats the eps/alpha shorthands
        file.eps = None;
        file.alpha = None;
    }
    match path.as_deref() {
        Some("naive") => file.path = Some(PathSpec::Naive),
        Some("fast") => file.path = Some(PathSpec::Fast),
        Some("both") => file.path = Some(PathSpec::Both),
        _ => {}
    }
    match diag.as_deref() {
        Some("all") => file.diag = Some(DiagSpec::All),
        Some("off") => file.diag = Some(DiagSpec::Off),
        _ => {}
    }

    let scenario = Scenario::resolve(file)?;
    let tags = run_tags(&scenario);
    println!(
        "scenario `{}`: {} run(s), dx = {}, T = {}",
        scenario.name,
        tags.len(),
        scenario.base.grid.dx(),
        scenario.base.final_time
    );
    let reports = run_scenario(&scenario)?;
    for (tag, report) in tags.iter().zip(&reports) {
        println!(
            "[{tag}] {} steps, lambda = {:.6}, N_eta = {}, gamma_0 = {:.6e}",
            report.echo.steps, report.echo.lambda, report.echo.n_eta, report.echo.gamma_0
        );
    }
    let files = write_outputs(&scenario, &reports, &out)?;
    println!("wrote {} file(s) to {}", files.len(), out.display());

    let mut all_ok = true;
    for (tag, report) in tags.iter().zip(&reports) {
        all_ok &= diagnostics_pass(tag, report);
    }
    Ok(all_ok)
}

fn eoc_study(
    config: Option<PathBuf>,
    preset: Option<String>,
    levels: usize,
    out: PathBuf,
) -> Result<()> {
    if levels < 3 {
        return Err(Error::Config("--levels must be at least 3".into()));
    }
    let mut file = load_file(config, preset)?;
    // refinement studies compare single runs
    file.sweep = None;
    let base = Scenario::resolve(file.clone())?;
    let t_star = base.base.final_time;
    let base_dx = base.base.grid.dx();

    println!(
        "refinement study `{}`: {} levels from dx = {base_dx}, t* = {t_star}",
        base.name, levels
    );
    let mut reports = Vec::with_capacity(levels);
    for level in 0..levels {
        let mut level_file = file.clone();
        level_file.dx = Some(base_dx / (1 << level) as f64);
        let scenario = Scenario::resolve(level_file)?;
        let report = run_scenario(&scenario)?.remove(0);
        println!(
            "  dx = {:.6e}: {} steps",
            scenario.base.grid.dx(),
            report.echo.steps
        );
        reports.push(report);
    }

    let mut rows: Vec<(f64, Option<f64>, Option<f64>)> = Vec::new();
    for i in 0..levels {
        let err = (i + 1 < levels)
            .then(|| {
                nonlocal_fv::diagnostics::l1_restricted_distance(
                    &reports[i],
                    &reports[i + 1],
                    t_star,
                )
            })
            .transpose()?;
        let order = if i + 2 < levels {
            Some(eoc(&reports[i], &reports[i + 1], &reports[i + 2], t_star)?)
        } else {
            None
        };
        rows.push((reports[i].echo.dx, err, order));
    }

    println!("{:>14} {:>16} {:>8}", "dx", "L1 diff", "order");
    for (dx, err, order) in &rows {
        println!(
            "{dx:>14.6e} {:>16} {:>8}",
            err.map(|e| format!("{e:.6e}")).unwrap_or_default(),
            order.map(|p| format!("{p:.3}")).unwrap_or_default()
        );
    }

    std::fs::create_dir_all(&out).map_err(|source| Error::Io {
        action: "create directory",
        path: out.clone(),
        source,
    })?;
    let path = out.join(format!("eoc_{}.csv", base.name));
    write_eoc_csv(&path, &rows)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate {
            config,
            preset,
            sweep,
            out,
            path,
            diag,
        } => simulate(config, preset, sweep, out, path, diag),
        Command::Eoc {
            config,
            preset,
            levels,
            out,
        } => eoc_study(config, preset, levels, out).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more diagnostics failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
