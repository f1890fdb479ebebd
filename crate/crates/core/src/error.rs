//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its admissible range, or declared model
    /// metadata contradicts the sampled behaviour of the function.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A user-supplied velocity callable produced NaN or infinity.
    #[error("custom velocity returned a non-finite value at q = {q}")]
    NonFiniteVelocity { q: f64 },

    /// Derivative requested from a custom model that has none.
    #[error("custom velocity model has no derivative callable")]
    MissingDerivative,

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    /// The grid is too coarse to resolve the kernel support: floor(eta/dx) = 0.
    #[error("kernel unresolved by grid: N_eta = floor(eta/dx) = 0 (eta = {eta}, dx = {dx})")]
    KernelUnresolved { eta: f64, dx: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid initial datum: {0}")]
    InvalidDatum(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    /// A fixed time-step ratio exceeds the stability bound.
    #[error("CFL violation: lambda = {lambda} exceeds the admissible bound {bound}")]
    CflViolation { lambda: f64, bound: f64 },

    /// The update produced NaN or infinity; the run is aborted.
    #[error("non-finite state at step {step}, cell {cell}: value = {value}")]
    NonFiniteState {
        step: usize,
        cell: usize,
        value: f64,
    },

    /// Fast and naive nonlocal evaluations disagree beyond the comparison
    /// tolerance while running with the paired path. Cell −1 is the left
    /// ghost entry of the field.
    #[error(
        "nonlocal path mismatch at cell {cell}: naive = {naive}, fast = {fast} \
         (relative deviation {rel_dev}, tolerance {tol})"
    )]
    PathMismatch {
        cell: isize,
        naive: f64,
        fast: f64,
        rel_dev: f64,
        tol: f64,
    },

    /// Refinement errors vanish, so log2(e1/e2) is meaningless.
    #[error("experimental order undefined: {0}")]
    UndefinedOrder(String),

    /// The runs handed to the refinement harness do not form a dx, dx/2,
    /// dx/4 family on the same domain.
    #[error("incompatible refinement runs: {0}")]
    IncompatibleRuns(String),

    #[error("unknown configuration keys: {0}")]
    UnknownKeys(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A solver error raised by one run of a parameter sweep.
    #[error("sweep run `{tag}` failed: {source}")]
    SweepRun {
        tag: String,
        #[source]
        source: Box<Error>,
    },

    #[error("failed to {action} `{path}`: {source}")]
    Io {
        action: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse `{path}`: {message}")]
    Parse { path: PathBuf, message: String },
}
