//! Velocity and transformation functions.
//!
//! The flux of the conservation law is q·V1(γ∗V2(q)): V2 maps the density to
//! a quantity of interest (an estimated density, a relative velocity, a blend
//! of both), the kernel averages it over the road ahead, and V1 turns the
//! average into a velocity. This module provides the built-in model families
//! together with the derivative and interval bounds the CFL condition and the
//! stability diagnostics need:
//!
//! - `Identity`             V(q) = q
//! - `GreenshieldsSquared`  V(q) = 1 − q²
//! - `QuadraticFree`        V(q) = (1 − q)²
//! - `Estimation(ε)`        V(q) = q + ε·q·(1 − q), ε ∈ [−1, 1]
//! - `Preference(α, …)`     V(q) = α·q/q_max + (1 − α)·(1 − v(q)/v_max)
//! - `Custom`               user callable with optional derivative callable
//!
//! All built-ins reduce to quadratic polynomials, so suprema and image
//! intervals are computed exactly from endpoints and the vertex. Custom
//! models fall back to a dense sample (1025 points) inflated by 1%.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Number of uniform sample points used by sampled bounds and by the
/// sign-condition validator.
pub const SAMPLE_POINTS: usize = 1025;

/// Safety factor applied to sampled (non-exact) suprema.
const SAMPLE_INFLATION: f64 = 1.01;

/// Points used to cross-check declared derivative signs at construction.
const VERIFY_POINTS: usize = 101;

/// Working interval on which declared monotonicity metadata is stated and
/// verified: densities are normalized to [0, 1] in all built-in families.
const WORKING_INTERVAL: Interval = Interval { lo: 0.0, hi: 1.0 };

/// A closed interval [lo, hi].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidParameter {
                name: "interval",
                reason: format!("[{lo}, {hi}] is not a finite ordered interval"),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `n` uniform samples covering the interval (endpoints included).
    fn samples(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let step = self.width() / (n - 1) as f64;
        (0..n).map(move |i| {
            if i + 1 == n {
                self.hi
            } else {
                self.lo + i as f64 * step
            }
        })
    }
}

/// Image of an interval under a model, with an exactness marker.
///
/// `exact` is false when the range had to be estimated by sampling (custom
/// models of unknown monotonicity).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageInterval {
    pub lo: f64,
    pub hi: f64,
    pub exact: bool,
}

impl ImageInterval {
    pub fn as_interval(&self) -> Interval {
        Interval {
            lo: self.lo,
            hi: self.hi,
        }
    }
}

/// Declared sign of V′ on the working interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    NonIncreasing,
    NonDecreasing,
    Unknown,
}

/// Declared sign of V″ on the working interval.
///
/// `Zero` marks affine models (V″ ≡ 0), which satisfy both one-sided
/// conditions of the monotonicity-preservation diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureSign {
    NonPositive,
    NonNegative,
    Zero,
    Unknown,
}

impl CurvatureSign {
    /// V″ ≤ 0 is known to hold.
    pub fn non_positive(self) -> bool {
        matches!(self, CurvatureSign::NonPositive | CurvatureSign::Zero)
    }

    /// V″ ≥ 0 is known to hold.
    pub fn non_negative(self) -> bool {
        matches!(self, CurvatureSign::NonNegative | CurvatureSign::Zero)
    }
}

type ModelFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Model family. Built-in variants carry their parameters; `Custom` carries
/// the callables directly.
#[derive(Clone)]
pub enum ModelKind {
    Identity,
    GreenshieldsSquared,
    QuadraticFree,
    Estimation {
        eps: f64,
    },
    Preference {
        alpha: f64,
        q_max: f64,
        v_max: f64,
        inner: Box<VelocityModel>,
    },
    Custom {
        f: ModelFn,
        df: Option<ModelFn>,
    },
}

impl fmt::Debug for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Identity => write!(f, "Identity"),
            ModelKind::GreenshieldsSquared => write!(f, "GreenshieldsSquared"),
            ModelKind::QuadraticFree => write!(f, "QuadraticFree"),
            ModelKind::Estimation { eps } => write!(f, "Estimation {{ eps: {eps} }}"),
            ModelKind::Preference {
                alpha,
                q_max,
                v_max,
                inner,
            } => write!(
                f,
                "Preference {{ alpha: {alpha}, q_max: {q_max}, v_max: {v_max}, inner: {inner:?} }}"
            ),
            ModelKind::Custom { df, .. } => write!(
                f,
                "Custom {{ has_derivative: {} }}",
                if df.is_some() { "true" } else { "false" }
            ),
        }
    }
}

/// A scalar model function with derivative access and exact interval bounds.
///
/// Models are immutable after construction and cheap to clone; they can be
/// shared freely across threads.
#[derive(Clone, Debug)]
pub struct VelocityModel {
    kind: ModelKind,
    monotonicity: Monotonicity,
    curvature: CurvatureSign,
}

/// Quadratic c0 + c1·q + c2·q², the closed form behind every built-in family.
#[derive(Clone, Copy, Debug)]
struct Quadratic {
    c0: f64,
    c1: f64,
    c2: f64,
}

impl Quadratic {
    fn eval(&self, q: f64) -> f64 {
        self.c0 + q * (self.c1 + q * self.c2)
    }

    fn derivative(&self, q: f64) -> f64 {
        self.c1 + 2.0 * self.c2 * q
    }

    /// Exact (min, max) of the quadratic over a closed interval: endpoints
    /// plus the vertex when it lies inside.
    fn range_on(&self, iv: Interval) -> (f64, f64) {
        let mut lo = self.eval(iv.lo).min(self.eval(iv.hi));
        let mut hi = self.eval(iv.lo).max(self.eval(iv.hi));
        if self.c2 != 0.0 {
            let vertex = -self.c1 / (2.0 * self.c2);
            if vertex > iv.lo && vertex < iv.hi {
                let v = self.eval(vertex);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Exact sup of |derivative| over a closed interval (the derivative is
    /// affine, so endpoints suffice).
    fn sup_abs_derivative_on(&self, iv: Interval) -> f64 {
        self.derivative(iv.lo)
            .abs()
            .max(self.derivative(iv.hi).abs())
    }
}

impl VelocityModel {
    /// V(q) = q.
    pub fn identity() -> Self {
        Self {
            kind: ModelKind::Identity,
            monotonicity: Monotonicity::NonDecreasing,
            curvature: CurvatureSign::Zero,
        }
    }

    /// V(q) = 1 − q², the Greenshields-type velocity used as V1 in the
    /// density-estimation scenario.
    pub fn greenshields_squared() -> Self {
        Self {
            kind: ModelKind::GreenshieldsSquared,
            monotonicity: Monotonicity::NonIncreasing,
            curvature: CurvatureSign::NonPositive,
        }
    }

    /// V(q) = (1 − q)², the velocity used as V1 in the preference scenario.
    pub fn quadratic_free() -> Self {
        Self {
            kind: ModelKind::QuadraticFree,
            monotonicity: Monotonicity::NonIncreasing,
            curvature: CurvatureSign::NonNegative,
        }
    }

    /// V(q) = q + ε·q·(1 − q): the density as estimated by drivers.
    ///
    /// ε < 0 underestimates, ε > 0 overestimates, and ε = 0 is the
    /// exact-knowledge baseline. For ε ∈ [−1, 1] the model is non-decreasing
    /// on [0, 1].
    pub fn estimation(eps: f64) -> Result<Self> {
        if !eps.is_finite() || !(-1.0..=1.0).contains(&eps) {
            return Err(Error::InvalidParameter {
                name: "eps",
                reason: format!("must lie in [-1, 1], got {eps}"),
            });
        }
        let curvature = if eps > 0.0 {
            CurvatureSign::NonPositive
        } else if eps < 0.0 {
            CurvatureSign::NonNegative
        } else {
            CurvatureSign::Zero
        };
        let model = Self {
            kind: ModelKind::Estimation { eps },
            monotonicity: Monotonicity::NonDecreasing,
            curvature,
        };
        model.verify_declared_monotonicity()?;
        Ok(model)
    }

    /// V(q) = α·q/q_max + (1 − α)·(1 − v(q)/v_max): a blend between relative
    /// density (α → 1) and relative velocity (α → 0), built on an inner
    /// velocity function v with v′ ≤ 0.
    pub fn preference(alpha: f64, q_max: f64, v_max: f64, inner: VelocityModel) -> Result<Self> {
        if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("must lie in [0, 1], got {alpha}"),
            });
        }
        if !(q_max.is_finite() && q_max > 0.0) {
            return Err(Error::InvalidParameter {
                name: "q_max",
                reason: format!("must be positive, got {q_max}"),
            });
        }
        if !(v_max.is_finite() && v_max > 0.0) {
            return Err(Error::InvalidParameter {
                name: "v_max",
                reason: format!("must be positive, got {v_max}"),
            });
        }
        if inner.monotonicity == Monotonicity::NonDecreasing {
            return Err(Error::InvalidParameter {
                name: "inner",
                reason: "the inner velocity v must be non-increasing (v' <= 0)".into(),
            });
        }
        // -(1-alpha) * v'' / v_max flips the inner curvature sign.
        let curvature = if alpha == 1.0 {
            CurvatureSign::Zero
        } else {
            match inner.curvature {
                CurvatureSign::NonPositive => CurvatureSign::NonNegative,
                CurvatureSign::NonNegative => CurvatureSign::NonPositive,
                CurvatureSign::Zero => CurvatureSign::Zero,
                CurvatureSign::Unknown => CurvatureSign::Unknown,
            }
        };
        let monotonicity = if inner.monotonicity == Monotonicity::NonIncreasing {
            Monotonicity::NonDecreasing
        } else {
            Monotonicity::Unknown
        };
        let model = Self {
            kind: ModelKind::Preference {
                alpha,
                q_max,
                v_max,
                inner: Box::new(inner),
            },
            monotonicity,
            curvature,
        };
        model.verify_declared_monotonicity()?;
        Ok(model)
    }

    /// A user-supplied model. Declared monotonicity and curvature are taken
    /// on trust only where they cannot be checked: when a derivative callable
    /// is present, the declared sign of V′ is verified by sampling on [0, 1];
    /// without one, the function values themselves are sampled.
    pub fn custom(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
        monotonicity: Monotonicity,
        curvature: CurvatureSign,
    ) -> Result<Self> {
        let model = Self {
            kind: ModelKind::Custom {
                f: Arc::new(f),
                df: df.map(|d| Arc::from(d) as ModelFn),
            },
            monotonicity,
            curvature,
        };
        model.verify_declared_monotonicity()?;
        Ok(model)
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn second_derivative_sign(&self) -> CurvatureSign {
        self.curvature
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Short human-readable description used in run reports.
    pub fn describe(&self) -> String {
        match &self.kind {
            ModelKind::Identity => "identity".into(),
            ModelKind::GreenshieldsSquared => "greenshields_squared".into(),
            ModelKind::QuadraticFree => "quadratic_free".into(),
            ModelKind::Estimation { eps } => format!("estimation(eps={eps})"),
            ModelKind::Preference {
                alpha,
                q_max,
                v_max,
                inner,
            } => format!(
                "preference(alpha={alpha}, q_max={q_max}, v_max={v_max}, inner={})",
                inner.describe()
            ),
            ModelKind::Custom { .. } => "custom".into(),
        }
    }

    /// Pointwise evaluation.
    pub fn eval(&self, q: f64) -> Result<f64> {
        debug_assert!(q.is_finite(), "eval expects finite q, got {q}");
        match &self.kind {
            ModelKind::Identity => Ok(q),
            ModelKind::GreenshieldsSquared => Ok(1.0 - q * q),
            ModelKind::QuadraticFree => Ok((1.0 - q) * (1.0 - q)),
            ModelKind::Estimation { eps } => Ok(q + eps * q * (1.0 - q)),
            ModelKind::Preference {
                alpha,
                q_max,
                v_max,
                inner,
            } => Ok(alpha * q / q_max + (1.0 - alpha) * (1.0 - inner.eval(q)? / v_max)),
            ModelKind::Custom { f, .. } => {
                let value = f(q);
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::NonFiniteVelocity { q })
                }
            }
        }
    }

    /// Closed-form derivative for built-ins; the user callable for custom
    /// models (erroring when none was supplied).
    pub fn derivative(&self, q: f64) -> Result<f64> {
        debug_assert!(q.is_finite(), "derivative expects finite q, got {q}");
        match &self.kind {
            ModelKind::Identity => Ok(1.0),
            ModelKind::GreenshieldsSquared => Ok(-2.0 * q),
            ModelKind::QuadraticFree => Ok(2.0 * (q - 1.0)),
            ModelKind::Estimation { eps } => Ok(1.0 + eps * (1.0 - 2.0 * q)),
            ModelKind::Preference {
                alpha,
                q_max,
                v_max,
                inner,
            } => Ok(alpha / q_max - (1.0 - alpha) * inner.derivative(q)? / v_max),
            ModelKind::Custom { df, .. } => {
                let df = df.as_ref().ok_or(Error::MissingDerivative)?;
                let value = df(q);
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::NonFiniteVelocity { q })
                }
            }
        }
    }

    /// sup |V| over a closed interval. Exact for built-ins, sampled and
    /// inflated by 1% for custom models.
    pub fn sup_abs_value(&self, iv: Interval) -> Result<f64> {
        if let Some(quad) = self.as_quadratic() {
            let (lo, hi) = quad.range_on(iv);
            return Ok(lo.abs().max(hi.abs()));
        }
        let mut sup: f64 = 0.0;
        for q in iv.samples(SAMPLE_POINTS) {
            sup = sup.max(self.eval(q)?.abs());
        }
        Ok(sup * SAMPLE_INFLATION)
    }

    /// sup |V′| over a closed interval. The derivative of every built-in is
    /// affine, so endpoint evaluation is exact; custom models are sampled and
    /// inflated by 1%.
    pub fn sup_abs_derivative(&self, iv: Interval) -> Result<f64> {
        if let Some(quad) = self.as_quadratic() {
            return Ok(quad.sup_abs_derivative_on(iv));
        }
        let mut sup: f64 = 0.0;
        for q in iv.samples(SAMPLE_POINTS) {
            sup = sup.max(self.derivative(q)?.abs());
        }
        Ok(sup * SAMPLE_INFLATION)
    }

    /// Image of a closed interval under V.
    ///
    /// Exact for built-ins (endpoints plus vertex) and for custom models of
    /// declared monotonicity; otherwise a sampled range marked `exact: false`.
    pub fn image_interval(&self, iv: Interval) -> Result<ImageInterval> {
        if let Some(quad) = self.as_quadratic() {
            let (lo, hi) = quad.range_on(iv);
            return Ok(ImageInterval {
                lo,
                hi,
                exact: true,
            });
        }
        match self.monotonicity {
            Monotonicity::NonDecreasing | Monotonicity::NonIncreasing => {
                let a = self.eval(iv.lo)?;
                let b = self.eval(iv.hi)?;
                Ok(ImageInterval {
                    lo: a.min(b),
                    hi: a.max(b),
                    exact: true,
                })
            }
            Monotonicity::Unknown => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for q in iv.samples(SAMPLE_POINTS) {
                    let v = self.eval(q)?;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                Ok(ImageInterval {
                    lo,
                    hi,
                    exact: false,
                })
            }
        }
    }

    /// The quadratic behind a built-in family, when one exists.
    fn as_quadratic(&self) -> Option<Quadratic> {
        match &self.kind {
            ModelKind::Identity => Some(Quadratic {
                c0: 0.0,
                c1: 1.0,
                c2: 0.0,
            }),
            ModelKind::GreenshieldsSquared => Some(Quadratic {
                c0: 1.0,
                c1: 0.0,
                c2: -1.0,
            }),
            ModelKind::QuadraticFree => Some(Quadratic {
                c0: 1.0,
                c1: -2.0,
                c2: 1.0,
            }),
            ModelKind::Estimation { eps } => Some(Quadratic {
                c0: 0.0,
                c1: 1.0 + eps,
                c2: -eps,
            }),
            ModelKind::Preference {
                alpha,
                q_max,
                v_max,
                inner,
            } => {
                let q = inner.as_quadratic()?;
                let scale = (1.0 - alpha) / v_max;
                Some(Quadratic {
                    c0: (1.0 - alpha) - scale * q.c0,
                    c1: alpha / q_max - scale * q.c1,
                    c2: -scale * q.c2,
                })
            }
            ModelKind::Custom { .. } => None,
        }
    }

    /// Checks the declared V′ sign against samples on the working interval.
    fn verify_declared_monotonicity(&self) -> Result<()> {
        let claim = self.monotonicity;
        if claim == Monotonicity::Unknown {
            return Ok(());
        }
        let has_derivative = match &self.kind {
            ModelKind::Custom { df, .. } => df.is_some(),
            _ => true,
        };
        // Sampled derivative signs (or value differences when the model has
        // no derivative) must not contradict the declaration. A small slack
        // absorbs rounding around sign changes that are genuinely zero.
        let slack = 1e-12;
        if has_derivative {
            for q in WORKING_INTERVAL.samples(VERIFY_POINTS) {
                let d = self.derivative(q)?;
                let violated = match claim {
                    Monotonicity::NonIncreasing => d > slack,
                    Monotonicity::NonDecreasing => d < -slack,
                    Monotonicity::Unknown => false,
                };
                if violated {
                    return Err(Error::InvalidParameter {
                        name: "monotonicity",
                        reason: format!(
                            "declared {claim:?} but V'({q}) = {d} on the working interval"
                        ),
                    });
                }
            }
        } else {
            let values: Vec<f64> = WORKING_INTERVAL
                .samples(VERIFY_POINTS)
                .map(|q| self.eval(q))
                .collect::<Result<_>>()?;
            for pair in values.windows(2) {
                let step = pair[1] - pair[0];
                let violated = match claim {
                    Monotonicity::NonIncreasing => step > slack,
                    Monotonicity::NonDecreasing => step < -slack,
                    Monotonicity::Unknown => false,
                };
                if violated {
                    return Err(Error::InvalidParameter {
                        name: "monotonicity",
                        reason: format!("declared {claim:?} contradicted by sampled values"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Decides the sign condition (V1′ ≤ 0 ∧ V2′ ≥ 0) ∨ (V1′ ≥ 0 ∧ V2′ ≤ 0) on
/// the given interval by sampling both derivatives at 1025 points.
///
/// This is the gate for the maximum principle and its per-step velocity
/// diagnostics: schemes built from pairs that fail it still run, but the
/// bound checks are not asserted for them.
pub fn sign_condition_holds(v1: &VelocityModel, v2: &VelocityModel, iv: Interval) -> Result<bool> {
    let slack = 1e-12;
    let mut branch_a = true; // V1' <= 0 and V2' >= 0
    let mut branch_b = true; // V1' >= 0 and V2' <= 0
    for q in iv.samples(SAMPLE_POINTS) {
        let d1 = v1.derivative(q)?;
        let d2 = v2.derivative(q)?;
        branch_a = branch_a && d1 <= slack && d2 >= -slack;
        branch_b = branch_b && d1 >= -slack && d2 <= slack;
        if !branch_a && !branch_b {
            return Ok(false);
        }
    }
    Ok(branch_a || branch_b)
}
