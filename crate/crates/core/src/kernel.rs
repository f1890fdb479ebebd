//! Nonlocal weight kernels and their exact per-cell quadrature.
//!
//! The nonlocal term averages downstream information with a nonnegative,
//! monotonically decreasing weight γ supported on [0, η]. On a grid of step
//! Δx the scheme needs the cell weights
//!
//!   γ_k = ∫_{kΔx}^{(k+1)Δx} γ(x) dx,   k = 0, …, N_η − 1,   N_η = ⌊η/Δx⌋,
//!
//! and these must be computed exactly — the discrete maximum principle leans
//! on γ_k ≤ γ_{k−1}, which numerical quadrature could break at rounding
//! level. Kernels are therefore piecewise polynomials of degree ≤ 3 whose
//! weights come from the closed-form antiderivative, splitting cells that
//! straddle piece breakpoints.

use crate::error::{Error, Result};
use crate::numeric::{kahan_sum, robust_floor_ratio};

/// Highest polynomial degree a kernel piece may have.
pub const MAX_DEGREE: usize = 3;

/// Tolerance for the sign checks run at kernel construction.
const SIGN_TOL: f64 = 1e-12;

/// One polynomial piece on \[lo, hi):
/// coeffs\[0\] + coeffs\[1\]·x + coeffs\[2\]·x² + coeffs\[3\]·x³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: [f64; 4],
}

impl Piece {
    pub fn new(lo: f64, hi: f64, coeffs: [f64; 4]) -> Self {
        Self { lo, hi, coeffs }
    }

    fn eval(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        c[0] + x * (c[1] + x * (c[2] + x * c[3]))
    }

    /// Antiderivative with F(0) = 0.
    fn antiderivative(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        x * (c[0] + x * (c[1] / 2.0 + x * (c[2] / 3.0 + x * c[3] / 4.0)))
    }

    fn derivative(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        c[1] + x * (2.0 * c[2] + x * 3.0 * c[3])
    }

    /// Candidate points for extrema of the piece polynomial: endpoints plus
    /// real roots of the derivative inside the piece.
    fn extremum_candidates(&self) -> Vec<f64> {
        let mut points = vec![self.lo, self.hi];
        let (a, b, c) = (3.0 * self.coeffs[3], 2.0 * self.coeffs[2], self.coeffs[1]);
        if a != 0.0 {
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                let s = disc.sqrt();
                for root in [(-b + s) / (2.0 * a), (-b - s) / (2.0 * a)] {
                    if root > self.lo && root < self.hi {
                        points.push(root);
                    }
                }
            }
        } else if b != 0.0 {
            let root = -c / b;
            if root > self.lo && root < self.hi {
                points.push(root);
            }
        }
        points
    }

    /// Candidate points for extrema of the derivative (a quadratic): piece
    /// endpoints plus the vertex of the derivative parabola.
    fn derivative_extremum_candidates(&self) -> Vec<f64> {
        let mut points = vec![self.lo, self.hi];
        if self.coeffs[3] != 0.0 {
            let vertex = -self.coeffs[2] / (3.0 * self.coeffs[3]);
            if vertex > self.lo && vertex < self.hi {
                points.push(vertex);
            }
        }
        points
    }
}

/// Nonnegative piecewise-polynomial weight function on [0, support_end].
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pieces: Vec<Piece>,
    support_end: f64,
    monotone_decreasing: bool,
}

impl Kernel {
    /// γ(x) = 2(η − x)/η² on [0, η]: total integral 1, linearly decreasing.
    pub fn linear_decreasing(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "eta must be positive, got {eta}"
            )));
        }
        Self::from_pieces(vec![Piece::new(
            0.0,
            eta,
            [2.0 / eta, -2.0 / (eta * eta), 0.0, 0.0],
        )])
    }

    /// γ ≡ 1/η on [0, η]: total integral 1, uniform look-ahead.
    pub fn constant(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "eta must be positive, got {eta}"
            )));
        }
        Self::from_pieces(vec![Piece::new(0.0, eta, [1.0 / eta, 0.0, 0.0, 0.0])])
    }

    /// Builds a kernel from explicit pieces.
    ///
    /// Pieces must start at 0, be contiguous, and evaluate nonnegative
    /// (checked at piece endpoints and interior extrema). Monotone decrease
    /// is checked the same way — per-piece derivative sign plus
    /// continuity-or-downward-jump at breakpoints — and recorded as a flag
    /// rather than enforced: the maximum-principle diagnostics require it,
    /// plain simulation does not.
    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidKernel("no pieces".into()));
        }
        for p in &pieces {
            if !(p.lo.is_finite() && p.hi.is_finite() && p.lo < p.hi) {
                return Err(Error::InvalidKernel(format!(
                    "piece [{}, {}) is not a finite ordered interval",
                    p.lo, p.hi
                )));
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidKernel("non-finite coefficient".into()));
            }
        }
        if pieces[0].lo != 0.0 {
            return Err(Error::InvalidKernel(format!(
                "support must start at 0, got {}",
                pieces[0].lo
            )));
        }
        for pair in pieces.windows(2) {
            if pair[0].hi != pair[1].lo {
                return Err(Error::InvalidKernel(format!(
                    "pieces are not contiguous: [{}, {}) then [{}, {})",
                    pair[0].lo, pair[0].hi, pair[1].lo, pair[1].hi
                )));
            }
        }
        for p in &pieces {
            for x in p.extremum_candidates() {
                let v = p.eval(x);
                if v < -SIGN_TOL {
                    return Err(Error::InvalidKernel(format!(
                        "kernel is negative at x = {x}: {v}"
                    )));
                }
            }
        }
        let mut monotone = true;
        for p in &pieces {
            for x in p.derivative_extremum_candidates() {
                if p.derivative(x) > SIGN_TOL {
                    monotone = false;
                }
            }
        }
        for pair in pieces.windows(2) {
            let left = pair[0].eval(pair[0].hi);
            let right = pair[1].eval(pair[1].lo);
            if right > left + SIGN_TOL {
                monotone = false;
            }
        }
        let support_end = pieces.last().unwrap().hi;
        Ok(Self {
            pieces,
            support_end,
            monotone_decreasing: monotone,
        })
    }

    pub fn support_end(&self) -> f64 {
        self.support_end
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Whether γ is monotonically non-increasing on its support. Required by
    /// the discrete maximum principle; recorded at construction.
    pub fn is_monotone_decreasing(&self) -> bool {
        self.monotone_decreasing
    }

    /// Pointwise value; 0 outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        for p in &self.pieces {
            // closed at the right end so eval(support_end) returns the
            // final piece value instead of 0
            if x >= p.lo && (x < p.hi || (x == p.hi && p.hi == self.support_end)) {
                return p.eval(x);
            }
        }
        0.0
    }

    /// Closed-form ∫_0^x γ(y) dy (clamped to the support).
    pub fn integral_up_to(&self, x: f64) -> f64 {
        self.integral_between(0.0, x)
    }

    /// Closed-form total integral ∫ γ.
    pub fn total_integral(&self) -> f64 {
        self.integral_between(0.0, self.support_end)
    }

    /// Closed-form ∫_a^b γ(y) dy via the per-piece antiderivative.
    pub fn integral_between(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        for p in &self.pieces {
            let lo = a.max(p.lo);
            let hi = b.min(p.hi);
            if hi > lo {
                total += p.antiderivative(hi) - p.antiderivative(lo);
            }
        }
        total
    }

    /// The truncation length η used by the scheme. Kernels here are compactly
    /// supported, so this is the supremum of the support regardless of Δx.
    pub fn truncation_eta(&self, dx: f64) -> f64 {
        debug_assert!(dx > 0.0);
        self.support_end
    }

    /// Exact cell weights γ_k for k = 0, …, N_η − 1 with N_η = ⌊η/Δx⌋.
    ///
    /// Cells straddling piece breakpoints are split and integrated per piece;
    /// no numerical quadrature is involved. When η is not an integer multiple
    /// of Δx the tail [N_η·Δx, η] is dropped, exactly matching the floor in
    /// the definition of N_η.
    pub fn weights(&self, dx: f64, eta: f64) -> Result<WeightVector> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "dx must be positive, got {dx}"
            )));
        }
        if eta > self.support_end * (1.0 + 1e-12) {
            return Err(Error::InvalidKernel(format!(
                "eta = {eta} exceeds the kernel support end {}",
                self.support_end
            )));
        }
        let n_eta = robust_floor_ratio(eta, dx);
        if n_eta == 0 {
            return Err(Error::KernelUnresolved { eta, dx });
        }
        let gamma = (0..n_eta)
            .map(|k| self.integral_between(k as f64 * dx, (k + 1) as f64 * dx))
            .collect();
        Ok(WeightVector { gamma, dx })
    }
}

/// The exact cell weights of a kernel at a fixed grid spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    gamma: Vec<f64>,
    dx: f64,
}

impl WeightVector {
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// γ_0, the weight of the nearest downstream cell. Enters both CFL
    /// denominators.
    pub fn gamma_0(&self) -> f64 {
        self.gamma[0]
    }

    pub fn n_eta(&self) -> usize {
        self.gamma.len()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Compensated Σ_k γ_k; equals ∫_0^{N_η·Δx} γ up to rounding.
    pub fn sum(&self) -> f64 {
        kahan_sum(&self.gamma)
    }

    /// γ_k ≤ γ_{k−1} for all k ≥ 1, up to `tol`.
    pub fn is_non_increasing(&self, tol: f64) -> bool {
        self.gamma.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}
