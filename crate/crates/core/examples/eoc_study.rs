//! Experimental order of convergence on a smooth hump.
//!
//! Runs the density-estimation model (exact-knowledge case) from the smooth
//! initial profile q0(x) = 1/4 + 1/2·exp(−8x²) at dx, dx/2, dx/4, restricts
//! finer solutions to coarser cells and prints log2 ratios of successive L¹
//! differences. A first-order scheme should show orders near 1.

use nonlocal_fv::diagnostics::{eoc, l1_restricted_distance};
use nonlocal_fv::{
    run, DiagnosticsMode, Grid1D, InitialDatum, Kernel, LambdaPolicy, NonlocalPath, Result,
    SolverConfig, VelocityModel,
};

fn config(dx: f64, final_time: f64) -> Result<SolverConfig> {
    Ok(SolverConfig {
        grid: Grid1D::new(-2.0, 3.0, dx)?,
        kernel: Kernel::linear_decreasing(0.5)?,
        v1: VelocityModel::greenshields_squared(),
        v2: VelocityModel::estimation(0.0)?,
        initial: InitialDatum::callable(|x| 0.25 + 0.5 * (-8.0 * x * x).exp(), true),
        final_time,
        lambda_policy: LambdaPolicy::PaperPreset,
        snapshot_times: vec![],
        nonlocal_path: NonlocalPath::Fast,
        diagnostics: DiagnosticsMode::Off,
    })
}

fn main() -> Result<()> {
    let t_star = 0.2;
    let base_dx = 1.0 / 200.0;
    let levels = 4;

    println!("smooth hump, V1 = 1 - q^2, V2 = Id, t* = {t_star}");
    let mut reports = Vec::new();
    for level in 0..levels {
        let dx = base_dx / (1 << level) as f64;
        let report = run(&config(dx, t_star)?)?;
        println!("  dx = {dx:.6e}: {} steps", report.echo.steps);
        reports.push(report);
    }

    println!("{:>14} {:>16} {:>8}", "dx", "L1 diff", "order");
    for i in 0..levels {
        let err = if i + 1 < levels {
            Some(l1_restricted_distance(
                &reports[i],
                &reports[i + 1],
                t_star,
            )?)
        } else {
            None
        };
        let order = if i + 2 < levels {
            Some(eoc(&reports[i], &reports[i + 1], &reports[i + 2], t_star)?)
        } else {
            None
        };
        println!(
            "{:>14.6e} {:>16} {:>8}",
            reports[i].echo.dx,
            err.map(|e| format!("{e:.6e}")).unwrap_or_default(),
            order.map(|p| format!("{p:.3}")).unwrap_or_default()
        );
    }
    Ok(())
}
