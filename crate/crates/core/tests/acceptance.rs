//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `--nocapture` to see them). Tolerances are pinned here and in
//! `diagnostics`; nothing is recalibrated at run time.
//!
//! The reference runs are the two model families on the plateau datum
//! q0 = 1/4 + 1/2·χ_{[−0.5,0.5]} at CI resolution dx = 4e-3 (the full
//! dx = 1e-3 variant of the bound checks is `#[ignore]`d; it runs in a few
//! seconds with the FFT path).

use std::sync::OnceLock;

use nonlocal_fv::config::{PathSpec, Scenario, ScenarioFile, SweepSpec};
use nonlocal_fv::diagnostics::{
    check_max_principle, eoc, l1_restricted_distance, mass_balance, max_velocity_diff_residual,
    MaxPrincipleCheck, MonotonicityFlag, RunReport, MASS_BALANCE_TOL, MAX_PRINCIPLE_TOL,
    VELOCITY_DIFF_TOL,
};
use nonlocal_fv::solver::{nonlocal_field_fast, nonlocal_field_naive};
use nonlocal_fv::{
    run, step, DiagnosticsMode, Grid1D, InitialDatum, Kernel, LambdaPolicy, NonlocalPath,
    SolverConfig, State, VelocityModel,
};

/// The six reference runs at CI scale: fig1 sweep ε ∈ {−0.5, 0, 0.5} and
/// fig2 sweep α ∈ {0, 0.5, 1}, both at dx = 4e-3 on the FFT path.
fn reference_runs(dx: f64) -> Vec<(String, RunReport)> {
    let mut out = Vec::new();
    for (preset, key, values) in [
        ("paper-fig1", "eps", vec![-0.5, 0.0, 0.5]),
        ("paper-fig2", "alpha", vec![0.0, 0.5, 1.0]),
    ] {
        let mut file = ScenarioFile::preset_only(preset);
        file.dx = Some(dx);
        file.path = Some(PathSpec::Fast);
        file.sweep = Some(SweepSpec {
            key: key.into(),
            values,
        });
        let scenario = Scenario::resolve(file).expect("preset resolves");
        let tags = nonlocal_fv::config::run_tags(&scenario);
        let reports = nonlocal_fv::config::run_scenario(&scenario).expect("preset runs");
        out.extend(tags.into_iter().zip(reports));
    }
    out
}

fn ci_runs() -> &'static [(String, RunReport)] {
    static RUNS: OnceLock<Vec<(String, RunReport)>> = OnceLock::new();
    RUNS.get_or_init(|| reference_runs(4e-3))
}

fn assert_bounds(tag: &str, report: &RunReport) {
    assert!(report.echo.sign_condition_ok, "{tag}: sign condition");
    assert!(report.echo.kernel_monotone, "{tag}: kernel monotone");
    let check = check_max_principle(report, 0.25, 0.75, MAX_PRINCIPLE_TOL);
    match check {
        MaxPrincipleCheck::Pass => {}
        MaxPrincipleCheck::Fail { step, cell, value } => {
            panic!("{tag}: bound violated at step {step}, cell {cell}: q = {value}")
        }
    }
}

#[test]
fn acceptance_01_discrete_maximum_principle() {
    for (tag, report) in ci_runs() {
        assert_bounds(tag, report);
    }
    println!("acceptance 01 discrete maximum principle (dx = 4e-3): PASS");
}

#[test]
#[ignore = "full-resolution variant; run explicitly with --ignored"]
fn acceptance_01_discrete_maximum_principle_full_scale() {
    for (tag, report) in reference_runs(1e-3) {
        assert_bounds(&tag, &report);
        // dt = dx/(3*gamma_0 + 1) with gamma_0 = 0.003996 gives
        // lambda = 0.988154... and ceil(0.5/dt) = 506 steps
        assert!((report.echo.lambda - 0.988154).abs() < 1e-6, "{tag}");
        assert_eq!(report.echo.steps, 506, "{tag}");
    }
    println!("acceptance 01 discrete maximum principle (dx = 1e-3): PASS");
}

#[test]
fn acceptance_02_velocity_difference_inequality() {
    for (tag, report) in ci_runs() {
        let worst = max_velocity_diff_residual(report)
            .unwrap_or_else(|| panic!("{tag}: no residual recorded"));
        assert!(
            worst <= VELOCITY_DIFF_TOL,
            "{tag}: max residual {worst} exceeds {VELOCITY_DIFF_TOL}"
        );
    }
    println!("acceptance 02 velocity-difference inequality: PASS");
}

#[test]
fn acceptance_03_constant_state_fixed_point() {
    let grid = Grid1D::new(0.0, 1.0, 0.02).unwrap();
    let kernel = Kernel::linear_decreasing(0.5).unwrap();
    let weights = kernel.weights(0.02, 0.5).unwrap();
    let v1 = VelocityModel::greenshields_squared();
    let v2 = VelocityModel::estimation(0.0).unwrap();
    let datum = InitialDatum::constant(0.4).unwrap();
    let initial = nonlocal_fv::project_initial(&datum, &grid).unwrap();
    let bits: Vec<u64> = initial.interior().iter().map(|q| q.to_bits()).collect();

    let lambda = 1.0 / (3.0 * weights.gamma_0() + 1.0);
    let mut state = initial;
    for n in 0..1000 {
        let field = nonlocal_field_naive(&state, &weights, &v1, &v2).unwrap();
        state = step(&state, &field, lambda).unwrap();
        for (j, q) in state.interior().iter().enumerate() {
            assert_eq!(
                q.to_bits(),
                bits[j],
                "step {n}, cell {j}: constant state drifted"
            );
        }
    }
    println!("acceptance 03 constant-state fixed point (1000 steps, bitwise): PASS");
}

#[test]
fn acceptance_04_conservation() {
    for (tag, report) in ci_runs() {
        let residual = mass_balance(report);
        assert!(
            residual < MASS_BALANCE_TOL,
            "{tag}: mass-balance residual {residual}"
        );
    }
    println!("acceptance 04 conservation (residual < 1e-10): PASS");
}

fn monotonicity_run(v1: VelocityModel, increasing: bool) -> RunReport {
    let width = 0.05;
    let initial = InitialDatum::callable(
        move |x: f64| {
            let s = 0.25 + 0.5 / (1.0 + ((0.5 - x) / width).exp());
            if increasing {
                s
            } else {
                1.0 - s
            }
        },
        true,
    );
    run(&SolverConfig {
        grid: Grid1D::new(-2.0, 3.0, 1.0 / 200.0).unwrap(),
        kernel: Kernel::linear_decreasing(0.5).unwrap(),
        v1,
        v2: VelocityModel::identity(),
        initial,
        final_time: 0.5,
        lambda_policy: LambdaPolicy::PaperPreset,
        snapshot_times: vec![],
        nonlocal_path: NonlocalPath::Naive,
        diagnostics: DiagnosticsMode::All,
    })
    .unwrap()
}

#[test]
fn acceptance_05_monotonicity_preservation() {
    // concave V1 (second derivative -2) preserves non-decreasing data
    let report = monotonicity_run(VelocityModel::greenshields_squared(), true);
    assert!(report.echo.steps > 0);
    for (n, record) in report.trace.iter().enumerate() {
        assert_eq!(
            record.monotonicity,
            Some(MonotonicityFlag::NonDecreasing),
            "rising ramp lost monotonicity at step {n}"
        );
    }
    // convex V1 (second derivative +2) preserves non-increasing data
    let report = monotonicity_run(VelocityModel::quadratic_free(), false);
    for (n, record) in report.trace.iter().enumerate() {
        assert_eq!(
            record.monotonicity,
            Some(MonotonicityFlag::NonIncreasing),
            "falling ramp lost monotonicity at step {n}"
        );
    }
    println!("acceptance 05 monotonicity preservation (tol 1e-12): PASS");
}

/// Max value, its position, and the rightmost position with q > 0.3 of the
/// final snapshot.
fn profile_stats(report: &RunReport) -> (f64, f64, f64) {
    let snapshot = report.final_snapshot();
    assert!((snapshot.time - 0.5).abs() < 1e-9);
    let echo = &report.echo;
    let center = |j: usize| echo.x_min + (j as f64 + 0.5) * echo.dx;
    let (mut max_q, mut argmax) = (f64::NEG_INFINITY, 0.0);
    let mut front = f64::NEG_INFINITY;
    for (j, &q) in snapshot.q.iter().enumerate() {
        if q > max_q {
            max_q = q;
            argmax = center(j);
        }
        if q > 0.3 {
            front = front.max(center(j));
        }
    }
    (max_q, argmax, front)
}

fn stats_for(tag: &str) -> (f64, f64, f64) {
    let (_, report) = ci_runs()
        .iter()
        .find(|(t, _)| t == tag)
        .unwrap_or_else(|| panic!("run {tag} missing"));
    profile_stats(report)
}

#[test]
fn acceptance_06_estimation_orderings() {
    // underestimation piles density higher and further downstream
    let (max_under, argmax_under, _) = stats_for("eps-0.5");
    let (max_exact, argmax_exact, _) = stats_for("eps0");
    let (max_over, _, _) = stats_for("eps0.5");
    assert!(
        max_under > max_exact && max_exact > max_over,
        "peak ordering violated: {max_under} / {max_exact} / {max_over}"
    );
    assert!(
        argmax_under >= argmax_exact,
        "peak position ordering violated: {argmax_under} < {argmax_exact}"
    );
    println!(
        "acceptance 06 estimation orderings: PASS \
         (max q: {max_under:.4} > {max_exact:.4} > {max_over:.4})"
    );
}

#[test]
fn acceptance_07_preference_orderings() {
    // more velocity preference (smaller alpha): lower peak, faster front
    let (max_0, _, front_0) = stats_for("alpha0");
    let (max_half, _, front_half) = stats_for("alpha0.5");
    let (max_1, _, front_1) = stats_for("alpha1");
    assert!(
        max_0 < max_half && max_half < max_1,
        "peak ordering violated: {max_0} / {max_half} / {max_1}"
    );
    assert!(
        front_0 > front_half && front_half > front_1,
        "front ordering violated: {front_0} / {front_half} / {front_1}"
    );
    println!(
        "acceptance 07 preference orderings: PASS \
         (front: {front_0:.3} > {front_half:.3} > {front_1:.3})"
    );
}

#[test]
fn acceptance_08_path_equivalence() {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(0x0c0ffee);
    let v1 = VelocityModel::greenshields_squared();
    let v2 = VelocityModel::estimation(-0.5).unwrap();
    let mut worst_overall: f64 = 0.0;
    for trial in 0..50 {
        let n: usize = rng.gen_range(256..=1024);
        let dx = 1.0 / n as f64;
        let kernel = if trial % 2 == 0 {
            Kernel::linear_decreasing(0.5).unwrap()
        } else {
            Kernel::constant(0.5).unwrap()
        };
        let weights = kernel.weights(dx, 0.5).unwrap();
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..0.8)).collect();
        let state = State::new(q, 0.25, 0.25, 0.0);
        let naive = nonlocal_field_naive(&state, &weights, &v1, &v2).unwrap();
        let fast = nonlocal_field_fast(&state, &weights, &v1, &v2).unwrap();
        let dev = nonlocal_fv::solver::max_relative_deviation(&naive, &fast);
        assert!(dev < 1e-12, "trial {trial} (n = {n}): deviation {dev}");
        worst_overall = worst_overall.max(dev);
    }
    println!(
        "acceptance 08 path equivalence (50 random states): PASS \
         (worst relative deviation {worst_overall:.3e})"
    );
}

#[test]
fn acceptance_09_weight_exactness() {
    let kernel = Kernel::linear_decreasing(0.5).unwrap();
    // oracle: antiderivative of 2(eta - x)/eta^2 at eta = 0.5 is 4x - 4x^2
    let integral_to = |x: f64| {
        let x = x.min(0.5);
        4.0 * x - 4.0 * x * x
    };
    for dx in [0.25, 0.1, 1e-3] {
        let weights = kernel.weights(dx, 0.5).unwrap();
        // compensated reference sum, independent of WeightVector::sum
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &g in weights.gamma() {
            let y = g - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        let exact = integral_to(weights.n_eta() as f64 * dx);
        assert!(
            (sum - exact).abs() <= 1e-14 * exact.abs().max(1e-30),
            "dx = {dx}: sum {sum} vs integral {exact}"
        );
        assert!(
            weights.is_non_increasing(1e-15 * weights.gamma_0().max(1.0)),
            "dx = {dx}: weights not non-increasing"
        );
    }
    let quarter = kernel.weights(0.25, 0.5).unwrap();
    assert_eq!(quarter.gamma(), &[0.75, 0.25]);
    println!("acceptance 09 weight exactness: PASS");
}

#[test]
fn acceptance_10_experimental_order_of_convergence() {
    let config = |dx: f64| SolverConfig {
        grid: Grid1D::new(-2.0, 3.0, dx).unwrap(),
        kernel: Kernel::linear_decreasing(0.5).unwrap(),
        v1: VelocityModel::greenshields_squared(),
        v2: VelocityModel::estimation(0.0).unwrap(),
        initial: InitialDatum::callable(|x| 0.25 + 0.5 * (-8.0 * x * x).exp(), true),
        final_time: 0.2,
        lambda_policy: LambdaPolicy::PaperPreset,
        snapshot_times: vec![],
        nonlocal_path: NonlocalPath::Fast,
        diagnostics: DiagnosticsMode::Off,
    };
    let coarse = run(&config(1.0 / 200.0)).unwrap();
    let mid = run(&config(1.0 / 400.0)).unwrap();
    let fine = run(&config(1.0 / 800.0)).unwrap();
    let order = eoc(&coarse, &mid, &fine, 0.2).unwrap();
    // first-order scheme; bracket frozen after an independent refinement
    // study measuring 0.997 on this configuration
    assert!(
        (0.7..=1.1).contains(&order),
        "observed order {order} outside [0.7, 1.1]"
    );
    // sanity: the error actually shrinks
    let e1 = l1_restricted_distance(&coarse, &mid, 0.2).unwrap();
    let e2 = l1_restricted_distance(&mid, &fine, 0.2).unwrap();
    assert!(e2 < e1);
    println!("acceptance 10 experimental order of convergence: PASS (order {order:.3})");
}

#[test]
fn acceptance_11_hand_computed_step_oracle() {
    let state = State::new(vec![0.2, 0.6, 0.4], 0.2, 0.4, 0.0);
    let weights = Kernel::linear_decreasing(0.5)
        .unwrap()
        .weights(0.25, 0.5)
        .unwrap();
    assert_eq!(weights.gamma(), &[0.75, 0.25]);
    let field = nonlocal_field_naive(
        &state,
        &weights,
        &VelocityModel::greenshields_squared(),
        &VelocityModel::identity(),
    )
    .unwrap();
    let next = step(&state, &field, 0.5).unwrap();
    // hand arithmetic:
    //   V_0 = 1 - (0.75*0.6 + 0.25*0.4)^2 = 1 - 0.55^2      = 0.6975
    //   V_1 = 1 - (0.75*0.4 + 0.25*0.4)^2 = 1 - 0.4^2       = 0.84
    //   q_1' = 0.6 - 0.5*(0.6*0.84 - 0.2*0.6975)
    //        = 0.6 - 0.5*(0.504 - 0.1395)                   = 0.41775
    assert!(
        (next.interior()[1] - 0.41775).abs() <= 1e-15,
        "q_1' = {}",
        next.interior()[1]
    );
    println!("acceptance 11 hand-computed step oracle: PASS");
}
