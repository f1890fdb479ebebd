//! User-defined velocity functions.
//!
//! Any pair of scalar callables can serve as V1 and V2. Built-ins come with
//! exact interval bounds; custom models fall back to dense sampling (1025
//! points, inflated by 1%) and their declared derivative signs are verified
//! at construction. The sign-condition gate — (V1′ ≤ 0 ∧ V2′ ≥ 0) or the
//! mirror image on the initial range — decides whether the maximum-principle
//! diagnostics apply to a run.

use nonlocal_fv::velocity::sign_condition_holds;
use nonlocal_fv::{
    run, CurvatureSign, DiagnosticsMode, Grid1D, InitialDatum, Interval, Kernel, LambdaPolicy,
    Monotonicity, NonlocalPath, Result, SolverConfig, VelocityModel,
};

fn main() -> Result<()> {
    // an exponential speed-density law as V1, with its closed-form derivative
    let v1 = VelocityModel::custom(
        |q: f64| (-2.0 * q).exp(),
        Some(Box::new(|q: f64| -2.0 * (-2.0 * q).exp())),
        Monotonicity::NonIncreasing,
        CurvatureSign::NonNegative,
    )?;
    // a saturating perception curve as V2
    let v2 = VelocityModel::custom(
        |q: f64| (2.0 * q).tanh() / 2.0f64.tanh(),
        Some(Box::new(|q: f64| {
            let c = (2.0 * q).cosh();
            2.0 / (c * c * 2.0f64.tanh())
        })),
        Monotonicity::NonDecreasing,
        CurvatureSign::Unknown,
    )?;

    let range = Interval::new(0.25, 0.75)?;
    println!(
        "sign condition on [0.25, 0.75]: {}",
        sign_condition_holds(&v1, &v2, range)?
    );
    let image = v2.image_interval(range)?;
    println!(
        "V2 image of [0.25, 0.75]: [{:.6}, {:.6}] (exact: {})",
        image.lo, image.hi, image.exact
    );
    println!(
        "||V1|| over that image: {:.6} (sampled, 1% inflated)",
        v1.sup_abs_value(image.as_interval())?
    );

    let config = SolverConfig {
        grid: Grid1D::new(-2.0, 3.0, 0.01)?,
        kernel: Kernel::constant(0.5)?,
        v1,
        v2,
        initial: InitialDatum::piecewise_constant(vec![-0.5, 0.5], vec![0.25, 0.75, 0.25])?,
        final_time: 0.5,
        lambda_policy: LambdaPolicy::CflFromEq,
        snapshot_times: vec![0.25],
        nonlocal_path: NonlocalPath::Naive,
        diagnostics: DiagnosticsMode::All,
    };
    let report = run(&config)?;
    let last = report.trace.last().unwrap();
    println!(
        "\nran {} steps at lambda = {:.6}",
        report.echo.steps, report.echo.lambda
    );
    println!(
        "final range [{:.12}, {:.12}] against bounds [0.25, 0.75]",
        last.min, last.max
    );
    println!(
        "max velocity-difference residual: {:.3e}",
        nonlocal_fv::diagnostics::max_velocity_diff_residual(&report).unwrap()
    );
    for warning in &report.warnings {
        println!("warning: {warning}");
    }
    Ok(())
}
