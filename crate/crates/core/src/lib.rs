//! Finite-volume solver for 1-D conservation laws with a nonlocal velocity:
//!
//!   ∂t q + ∂x( V1(γ ∗ V2(q)) · q ) = 0,
//!   γ ∗ V2(q)(t, x) = ∫ₓ^∞ γ(y − x) V2(q(t, y)) dy,
//!
//! a traffic-flow model class in which drivers react to a weighted average of
//! downstream information: V2 maps density to a quantity of interest, γ
//! weights how far ahead it is sampled, and V1 turns the average into a
//! velocity. The two classical nonlocal models are the special cases V2 = Id
//! (averaged density) and V1 = Id (averaged velocity).
//!
//! The crate provides:
//!
//! - exact per-cell kernel weights from piecewise-polynomial antiderivatives
//!   ([`kernel`]),
//! - conservative projection of initial data and constant ghost extension
//!   ([`grid`]),
//! - the Godunov-type upwind scheme with CFL control and a choice of naive,
//!   FFT-accelerated, or paired nonlocal evaluation ([`solver`]),
//! - run-time verification of the scheme's proved properties — discrete
//!   maximum principle, velocity-difference estimate, conservation,
//!   monotonicity preservation — plus a grid-refinement (EOC) harness
//!   ([`diagnostics`]),
//! - scenario presets, config-file parsing, parameter sweeps and CSV/JSON
//!   writers ([`config`], [`output`]).
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release -p nonlocal-fv --example paper_fig1      # density-estimation sweep
//! cargo run --release -p nonlocal-fv --example paper_fig2      # preference-blend sweep
//! cargo run --release -p nonlocal-fv --example kernel_weights  # exact quadrature weights
//! cargo run --release -p nonlocal-fv --example custom_model    # user-defined velocities
//! cargo run --release -p nonlocal-fv --example monotonicity    # monotonicity preservation
//! cargo run --release -p nonlocal-fv --example fast_vs_naive   # FFT path vs reference path
//! cargo run --release -p nonlocal-fv --example eoc_study       # experimental convergence order
//! ```
//!
//! The same functionality is scriptable through the thin `nonlocal-fv` binary
//! (`simulate` and `eoc` subcommands); see the README for the config-file
//! schema.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod kernel;
mod numeric;
pub mod output;
pub mod solver;
pub mod velocity;

pub use error::{Error, Result};
pub use grid::{project_initial, Grid1D, InitialDatum, State};
pub use kernel::{Kernel, Piece, WeightVector};
pub use solver::{
    cfl_lambda, nonlocal_field_fast, nonlocal_field_naive, run, step, DiagnosticsMode,
    LambdaPolicy, NonlocalField, NonlocalPath, SolverConfig,
};
pub use velocity::{CurvatureSign, Interval, Monotonicity, VelocityModel};
