//! Scenario configuration: presets, config files and parameter sweeps.
//!
//! Scenarios are described by human-readable TOML files:
//!
//! ```toml
//! name = "demo"
//! dx = 0.004
//! final_time = 0.5
//! domain = { x_min = -2.0, x_max = 3.0 }
//! kernel = { kind = "linear_decreasing", eta = 0.5 }
//! initial = { kind = "piecewise", breaks = [-0.5, 0.5], values = [0.25, 0.75, 0.25] }
//! v1 = { kind = "greenshields_squared" }
//! v2 = { kind = "estimation", eps = -0.5 }
//! lambda = { policy = "paper_preset" }
//! path = "naive"
//! diag = "all"
//! sweep = { key = "eps", values = [-0.5, 0.0, 0.5] }
//! ```
//!
//! `preset = "paper-fig1"` (density estimation) or `"paper-fig2"` (preference
//! blend) expands to the full reference scenario first; any explicitly given
//! key then overrides the preset value. The `-coarse` preset variants run the
//! same physics at dx = 4e-3 for quick turnarounds.

use std::collections::BTreeSet;
use std::path::Path;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::diagnostics::RunReport;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, InitialDatum};
use crate::kernel::{Kernel, Piece};
use crate::solver::{cfl_lambda, run, DiagnosticsMode, LambdaPolicy, NonlocalPath, SolverConfig};
use crate::velocity::VelocityModel;

/// Comparison tolerance used when the paired nonlocal path is selected from a
/// config file.
pub const BOTH_PATH_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    LinearDecreasing { eta: f64 },
    Constant { eta: f64 },
    Piecewise { pieces: Vec<PieceSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceSpec {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    Piecewise { breaks: Vec<f64>, values: Vec<f64> },
    Constant { value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
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
        inner: Box<ModelSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum LambdaSpec {
    Cfl,
    PaperPreset,
    Fixed { value: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathSpec {
    Naive,
    Fast,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagSpec {
    All,
    Off,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub key: String,
    pub values: Vec<f64>,
}

/// The raw key-value content of a scenario file. All fields are optional so
/// presets and command-line flags can fill the gaps; `Scenario::resolve`
/// checks that everything required ends up present.
///
/// Scalar fields come before table-valued ones so the echo serializes as
/// valid TOML.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Shorthand: replaces the estimation parameter of `v2` and suppresses
    /// any default sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Shorthand: replaces the preference parameter of `v2` and suppresses
    /// any default sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diag: Option<DiagSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    #[serde(alias = "V1", skip_serializing_if = "Option::is_none")]
    pub v1: Option<ModelSpec>,
    #[serde(alias = "V2", skip_serializing_if = "Option::is_none")]
    pub v2: Option<ModelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl ScenarioFile {
    /// Parses a scenario file, rejecting unknown keys.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            action: "read",
            path: path.to_path_buf(),
            source,
        })?;
        let mut file = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(message) => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })?;
        if file.name.is_none() {
            file.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(file)
    }

    /// Parses scenario TOML from a string.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Value =
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid TOML: {e}")))?;
        let unknown = collect_unknown_keys(&value);
        if !unknown.is_empty() {
            return Err(Error::UnknownKeys(
                unknown.into_iter().collect::<Vec<_>>().join(", "),
            ));
        }
        value
            .try_into()
            .map_err(|e| Error::Config(format!("invalid scenario: {e}")))
    }

    /// A file that only names a preset.
    pub fn preset_only(name: &str) -> Self {
        Self {
            preset: Some(name.to_string()),
            ..Self::default()
        }
    }

    /// Fills every `None` field from `base` (explicit values win).
    fn or_else_from(mut self, base: ScenarioFile) -> ScenarioFile {
        self.name = self.name.or(base.name);
        self.eps = self.eps.or(base.eps);
        self.alpha = self.alpha.or(base.alpha);
        self.dx = self.dx.or(base.dx);
        self.final_time = self.final_time.or(base.final_time);
        self.snapshot_times = self.snapshot_times.or(base.snapshot_times);
        self.path = self.path.or(base.path);
        self.diag = self.diag.or(base.diag);
        self.domain = self.domain.or(base.domain);
        self.kernel = self.kernel.or(base.kernel);
        self.initial = self.initial.or(base.initial);
        self.v1 = self.v1.or(base.v1);
        self.v2 = self.v2.or(base.v2);
        self.lambda = self.lambda.or(base.lambda);
        self.sweep = self.sweep.or(base.sweep);
        self
    }
}

/// Walks the parsed TOML against the documented schema and returns the paths
/// of all keys it does not know.
fn collect_unknown_keys(value: &toml::Value) -> BTreeSet<String> {
    const TOP: &[&str] = &[
        "preset",
        "name",
        "eps",
        "alpha",
        "dx",
        "final_time",
        "snapshot_times",
        "path",
        "diag",
        "domain",
        "kernel",
        "initial",
        "v1",
        "V1",
        "v2",
        "V2",
        "lambda",
        "sweep",
    ];
    let mut unknown = BTreeSet::new();
    let Some(table) = value.as_table() else {
        return unknown;
    };
    for (key, sub) in table {
        if !TOP.contains(&key.as_str()) {
            unknown.insert(key.clone());
            continue;
        }
        match key.as_str() {
            "domain" => check_table_keys(sub, key, &["x_min", "x_max"], &mut unknown),
            "kernel" => {
                let allowed: &[&str] = match kind_of(sub) {
                    Some("piecewise") => &["kind", "pieces"],
                    _ => &["kind", "eta"],
                };
                check_table_keys(sub, key, allowed, &mut unknown);
                if let Some(pieces) = sub.get("pieces").and_then(|p| p.as_array()) {
                    for (i, piece) in pieces.iter().enumerate() {
                        check_table_keys(
                            piece,
                            &format!("{key}.pieces[{i}]"),
                            &["lo", "hi", "coeffs"],
                            &mut unknown,
                        );
                    }
                }
            }
            "initial" => {
                let allowed: &[&str] = match kind_of(sub) {
                    Some("constant") => &["kind", "value"],
                    _ => &["kind", "breaks", "values"],
                };
                check_table_keys(sub, key, allowed, &mut unknown);
            }
            "v1" | "V1" | "v2" | "V2" => check_model_keys(sub, key, &mut unknown),
            "lambda" => {
                let allowed: &[&str] = match sub.get("policy").and_then(|k| k.as_str()) {
                    Some("fixed") => &["policy", "value"],
                    _ => &["policy"],
                };
                check_table_keys(sub, key, allowed, &mut unknown);
            }
            "sweep" => check_table_keys(sub, key, &["key", "values"], &mut unknown),
            _ => {}
        }
    }
    unknown
}

fn kind_of(value: &toml::Value) -> Option<&str> {
    value.get("kind").and_then(|k| k.as_str())
}

fn check_table_keys(
    value: &toml::Value,
    prefix: &str,
    allowed: &[&str],
    unknown: &mut BTreeSet<String>,
) {
    if let Some(table) = value.as_table() {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                unknown.insert(format!("{prefix}.{key}"));
            }
        }
    }
}

fn check_model_keys(value: &toml::Value, prefix: &str, unknown: &mut BTreeSet<String>) {
    let allowed: &[&str] = match kind_of(value) {
        Some("estimation") => &["kind", "eps"],
        Some("preference") => &["kind", "alpha", "q_max", "v_max", "inner"],
        _ => &["kind"],
    };
    check_table_keys(value, prefix, allowed, unknown);
    if let Some(inner) = value.get("inner") {
        check_model_keys(inner, &format!("{prefix}.inner"), unknown);
    }
}

/// The reference scenarios, fully spelled out.
///
/// - `paper-fig1`: density-estimation family, V1(q) = 1 − q²,
///   V2(q) = q + ε·q·(1 − q), default sweep ε ∈ {−0.5, 0, 0.5}.
/// - `paper-fig2`: preference family, V1(q) = (1 − q)², V2 the α-blend of
///   relative density and relative velocity with v(q) = 1 − q²,
///   default sweep α ∈ {0, 0.25, 0.5, 0.75, 1}.
///
/// Both use the linear kernel with η = 0.5, the plateau datum
/// q₀ = 1/4 + 1/2·χ_{[−0.5,0.5]}, Δt = Δx/(3γ₀ + 1), T = 0.5 and Δx = 1e-3.
/// The `-coarse` variants run Δx = 4e-3 on the reference (naive) path for
/// quick checks; the full-resolution presets default to the FFT path.
pub fn preset(name: &str) -> Result<ScenarioFile> {
    let (dx, path, base_name) = match name {
        "paper-fig1" | "paper-fig2" => (1e-3, PathSpec::Fast, name),
        "paper-fig1-coarse" => (4e-3, PathSpec::Naive, "paper-fig1"),
        "paper-fig2-coarse" => (4e-3, PathSpec::Naive, "paper-fig2"),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    let (v1, v2, sweep) = if base_name == "paper-fig1" {
        (
            ModelSpec::GreenshieldsSquared,
            ModelSpec::Estimation { eps: 0.0 },
            SweepSpec {
                key: "eps".into(),
                values: vec![-0.5, 0.0, 0.5],
            },
        )
    } else {
        (
            ModelSpec::QuadraticFree,
            ModelSpec::Preference {
                alpha: 0.5,
                q_max: 1.0,
                v_max: 1.0,
                inner: Box::new(ModelSpec::GreenshieldsSquared),
            },
            SweepSpec {
                key: "alpha".into(),
                values: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            },
        )
    };
    Ok(ScenarioFile {
        preset: None,
        name: Some(name.to_string()),
        eps: None,
        alpha: None,
        dx: Some(dx),
        final_time: Some(0.5),
        snapshot_times: Some(vec![]),
        path: Some(path),
        diag: Some(DiagSpec::All),
        domain: Some(DomainSpec {
            x_min: -2.0,
            x_max: 3.0,
        }),
        kernel: Some(KernelSpec::LinearDecreasing { eta: 0.5 }),
        initial: Some(InitialSpec::Piecewise {
            breaks: vec![-0.5, 0.5],
            values: vec![0.25, 0.75, 0.25],
        }),
        v1: Some(v1),
        v2: Some(v2),
        lambda: Some(LambdaSpec::PaperPreset),
        sweep: Some(sweep),
    })
}

/// Which model parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKey {
    Eps,
    Alpha,
}

impl SweepKey {
    fn parse(key: &str) -> Result<Self> {
        match key {
            "eps" => Ok(SweepKey::Eps),
            "alpha" => Ok(SweepKey::Alpha),
            other => Err(Error::Config(format!(
                "unknown sweep key `{other}` (expected `eps` or `alpha`)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SweepKey::Eps => "eps",
            SweepKey::Alpha => "alpha",
        }
    }
}

/// A fully validated scenario: the resolved file echo, the base solver
/// configuration, and an optional sweep axis.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    file: ScenarioFile,
    pub base: SolverConfig,
    pub sweep: Option<(SweepKey, Vec<f64>)>,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.file == other.file
    }
}

impl Scenario {
    /// Expands presets, applies shorthand overrides, validates every module
    /// contract (grid, kernel weights, velocity models, CFL policy) and
    /// builds the solver configuration.
    pub fn resolve(file: ScenarioFile) -> Result<Self> {
        let mut file = match &file.preset {
            Some(name) => {
                let base = preset(name)?;
                let mut merged = file.clone().or_else_from(base);
                merged.preset = None;
                merged
            }
            None => file,
        };

        // shorthand parameters replace the matching v2 parameter and pin the
        // scenario to a single run unless a sweep was given explicitly
        if let Some(eps) = file.eps.take() {
            file.v2 = Some(apply_sweep_value(file.v2.take(), SweepKey::Eps, eps)?);
            if file.sweep.as_ref().is_some_and(|s| s.key == "eps") {
                file.sweep = None;
            }
        }
        if let Some(alpha) = file.alpha.take() {
            file.v2 = Some(apply_sweep_value(file.v2.take(), SweepKey::Alpha, alpha)?);
            if file.sweep.as_ref().is_some_and(|s| s.key == "alpha") {
                file.sweep = None;
            }
        }

        let name = file.name.clone().unwrap_or_else(|| "scenario".to_string());
        file.name = Some(name.clone());

        let missing: Vec<&str> = [
            ("dx", file.dx.is_none()),
            ("final_time", file.final_time.is_none()),
            ("domain", file.domain.is_none()),
            ("kernel", file.kernel.is_none()),
            ("initial", file.initial.is_none()),
            ("v1", file.v1.is_none()),
            ("v2", file.v2.is_none()),
        ]
        .iter()
        .filter_map(|&(key, missing)| missing.then_some(key))
        .collect();
        if !missing.is_empty() {
            return Err(Error::Config(format!(
                "missing required keys: {}",
                missing.join(", ")
            )));
        }

        // defaults for the optional knobs, echoed explicitly
        if file.snapshot_times.is_none() {
            file.snapshot_times = Some(vec![]);
        }
        if file.path.is_none() {
            file.path = Some(PathSpec::Naive);
        }
        if file.diag.is_none() {
            file.diag = Some(DiagSpec::All);
        }
        if file.lambda.is_none() {
            file.lambda = Some(LambdaSpec::Cfl);
        }

        let sweep = match &file.sweep {
            Some(spec) if !spec.values.is_empty() => {
                Some((SweepKey::parse(&spec.key)?, spec.values.clone()))
            }
            _ => None,
        };

        let base = build_solver_config(&file)?;
        let scenario = Self {
            name,
            file,
            base,
            sweep,
        };
        // run the full validation chain once per swept configuration:
        // weights, stencil fit, projection, bounds, CFL policy
        for (tag, config) in scenario.expand()? {
            let validate = || -> Result<()> {
                let dx = config.grid.dx();
                let weights = config
                    .kernel
                    .weights(dx, config.kernel.truncation_eta(dx))?;
                if config.grid.n_cells() < 2 * weights.n_eta() {
                    return Err(Error::InvalidConfig(format!(
                        "grid has {} cells but the kernel stencil needs at least 2*N_eta = {}",
                        config.grid.n_cells(),
                        2 * weights.n_eta()
                    )));
                }
                cfl_lambda(&config)?;
                Ok(())
            };
            validate().map_err(|e| Error::SweepRun {
                tag,
                source: Box::new(e),
            })?;
        }
        Ok(scenario)
    }

    /// The normalized key-value echo: writing it and parsing it back yields
    /// an identical scenario.
    pub fn echo_file(&self) -> &ScenarioFile {
        &self.file
    }

    pub fn echo_toml(&self) -> String {
        toml::to_string(&self.file).expect("scenario echo serializes")
    }

    /// Tags and solver configurations of every run in the sweep (a single
    /// entry when no sweep is active).
    pub fn expand(&self) -> Result<Vec<(String, SolverConfig)>> {
        match &self.sweep {
            None => Ok(vec![(self.name.clone(), self.base.clone())]),
            Some((key, values)) => values
                .iter()
                .map(|&value| {
                    let mut file = self.file.clone();
                    file.v2 = Some(apply_sweep_value(file.v2.take(), *key, value)?);
                    let config = build_solver_config(&file)?;
                    Ok((format!("{}{}", key.as_str(), value), config))
                })
                .collect(),
        }
    }
}

/// Replaces the swept parameter inside a v2 model spec.
fn apply_sweep_value(spec: Option<ModelSpec>, key: SweepKey, value: f64) -> Result<ModelSpec> {
    match (key, spec) {
        (SweepKey::Eps, None) => Ok(ModelSpec::Estimation { eps: value }),
        (SweepKey::Eps, Some(ModelSpec::Estimation { .. })) => {
            Ok(ModelSpec::Estimation { eps: value })
        }
        (
            SweepKey::Alpha,
            Some(ModelSpec::Preference {
                q_max,
                v_max,
                inner,
                ..
            }),
        ) => Ok(ModelSpec::Preference {
            alpha: value,
            q_max,
            v_max,
            inner,
        }),
        (key, spec) => Err(Error::Config(format!(
            "cannot apply {} = {value}: v2 is {spec:?}",
            key.as_str()
        ))),
    }
}

fn build_model(spec: &ModelSpec) -> Result<VelocityModel> {
    match spec {
        ModelSpec::Identity => Ok(VelocityModel::identity()),
        ModelSpec::GreenshieldsSquared => Ok(VelocityModel::greenshields_squared()),
        ModelSpec::QuadraticFree => Ok(VelocityModel::quadratic_free()),
        ModelSpec::Estimation { eps } => VelocityModel::estimation(*eps),
        ModelSpec::Preference {
            alpha,
            q_max,
            v_max,
            inner,
        } => VelocityModel::preference(*alpha, *q_max, *v_max, build_model(inner)?),
    }
}

fn build_kernel(spec: &KernelSpec) -> Result<Kernel> {
    match spec {
        KernelSpec::LinearDecreasing { eta } => Kernel::linear_decreasing(*eta),
        KernelSpec::Constant { eta } => Kernel::constant(*eta),
        KernelSpec::Piecewise { pieces } => Kernel::from_pieces(
            pieces
                .iter()
                .map(|p| Piece::new(p.lo, p.hi, p.coeffs))
                .collect(),
        ),
    }
}

fn build_initial(spec: &InitialSpec) -> Result<InitialDatum> {
    match spec {
        InitialSpec::Piecewise { breaks, values } => {
            InitialDatum::piecewise_constant(breaks.clone(), values.clone())
        }
        InitialSpec::Constant { value } => InitialDatum::constant(*value),
    }
}

fn build_solver_config(file: &ScenarioFile) -> Result<SolverConfig> {
    let domain = file.domain.as_ref().expect("checked by resolve");
    let dx = file.dx.expect("checked by resolve");
    let grid = Grid1D::new(domain.x_min, domain.x_max, dx)?;
    let kernel = build_kernel(file.kernel.as_ref().expect("checked by resolve"))?;
    let initial = build_initial(file.initial.as_ref().expect("checked by resolve"))?;
    let v1 = build_model(file.v1.as_ref().expect("checked by resolve"))?;
    let v2 = build_model(file.v2.as_ref().expect("checked by resolve"))?;
    let lambda_policy = match file.lambda.as_ref().expect("defaulted by resolve") {
        LambdaSpec::Cfl => LambdaPolicy::CflFromEq,
        LambdaSpec::PaperPreset => LambdaPolicy::PaperPreset,
        LambdaSpec::Fixed { value } => LambdaPolicy::FixedLambda(*value),
    };
    let nonlocal_path = match file.path.expect("defaulted by resolve") {
        PathSpec::Naive => NonlocalPath::Naive,
        PathSpec::Fast => NonlocalPath::Fast,
        PathSpec::Both => NonlocalPath::Both {
            compare_tol: BOTH_PATH_TOL,
        },
    };
    let diagnostics = match file.diag.expect("defaulted by resolve") {
        DiagSpec::All => DiagnosticsMode::All,
        DiagSpec::Off => DiagnosticsMode::Off,
    };
    Ok(SolverConfig {
        grid,
        kernel,
        v1,
        v2,
        initial,
        final_time: file.final_time.expect("checked by resolve"),
        lambda_policy,
        snapshot_times: file.snapshot_times.clone().unwrap_or_default(),
        nonlocal_path,
        diagnostics,
    })
}

/// Parses and fully validates a scenario file.
pub fn parse_config(path: &Path) -> Result<Scenario> {
    Scenario::resolve(ScenarioFile::from_path(path)?)
}

/// Runs every configuration of a scenario's sweep; independent runs execute
/// concurrently and the reports come back in sweep order.
pub fn run_scenario(scenario: &Scenario) -> Result<Vec<RunReport>> {
    let configs = scenario.expand()?;
    if configs.len() == 1 {
        let (tag, config) = &configs[0];
        return run(config).map(|r| vec![r]).map_err(|e| Error::SweepRun {
            tag: tag.clone(),
            source: Box::new(e),
        });
    }
    thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|(tag, config)| (tag.clone(), scope.spawn(move || run(config))))
            .collect();
        handles
            .into_iter()
            .map(|(tag, handle)| {
                handle
                    .join()
                    .expect("solver threads do not panic")
                    .map_err(|e| Error::SweepRun {
                        tag,
                        source: Box::new(e),
                    })
            })
            .collect()
    })
}

/// Tags of the runs a scenario expands to, in order.
pub fn run_tags(scenario: &Scenario) -> Vec<String> {
    match &scenario.sweep {
        None => vec![scenario.name.clone()],
        Some((key, values)) => values
            .iter()
            .map(|v| format!("{}{}", key.as_str(), v))
            .collect(),
    }
}
