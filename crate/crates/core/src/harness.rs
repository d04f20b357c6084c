//! Run configuration, reports and the commands behind the CLI.
//!
//! Every command takes a [`RunConfig`] and returns a [`CurvatureReport`]
//! (or a [`CatalogReport`]); the JSON form has a fixed field order and the
//! only field that differs between identical runs is `wall_time_s`.

mod commands;
mod render;
pub mod suites;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homspace::catalog::build_case;
use crate::homspace::{randers_perturb, CaseParams, CatalogCase, CosetSpace, InvariantABMetric, RiemannianHomMetric};
use crate::minkowski::PhiFunction;
use crate::numkernel::linalg::DenseMatrix;
use crate::numkernel::MinimizerConfig;

pub use commands::{cmd_catalog, cmd_crosscheck, cmd_scan, cmd_search_metric, cmd_verify_case};

/// Default block-scalar grid for the metric search.
pub const DEFAULT_GRID: [f64; 8] = [0.1, 0.2, 0.35, 0.5, 0.7, 0.85, 1.0, 1.25];

/// `|S|` below this counts as vanishing.
pub const S_TOL: f64 = 1e-8;

/// A sampled minimum must exceed this before a flag curvature counts as positive.
pub const POSITIVE_MARGIN: f64 = 1e-6;

/// Oracle suites known to `crosscheck`.
pub const SUITES: [&str; 5] = ["s-curvature", "localization", "zero-flag", "riemannian", "structural"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceConfig,
    pub metric: MetricConfig,
    pub scan: ScanConfig,
    pub oracle: OracleConfig,
    pub seed: u64,
    /// Where the CLI writes the JSON report, if anywhere.
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            space: SpaceConfig::default(),
            metric: MetricConfig::default(),
            scan: ScanConfig::default(),
            oracle: OracleConfig::default(),
            seed: 1,
            out: None,
        }
    }
}

/// Catalog case and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceConfig {
    #[serde(alias = "family")]
    pub case: u8,
    pub n: usize,
    pub k: i64,
    pub l: i64,
    pub torus: Option<[[f64; 3]; 2]>,
    pub negative_control: bool,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        let p = CaseParams::default();
        SpaceConfig {
            case: p.case,
            n: p.n,
            k: p.k,
            l: p.l,
            torus: p.torus,
            negative_control: p.negative_control,
        }
    }
}

impl SpaceConfig {
    pub fn params(&self) -> CaseParams {
        CaseParams {
            case: self.case,
            n: self.n,
            k: self.k,
            l: self.l,
            torus: self.torus,
            negative_control: self.negative_control,
        }
    }
}

/// `v` as a named direction or explicit `m` coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VChoice {
    Named(String),
    Coords(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricConfig {
    /// Block scalars; all ones when absent.
    pub blocks: Option<Vec<f64>>,
    /// Full inner product on `m`, overriding `blocks`.
    pub inner: Option<Vec<Vec<f64>>>,
    pub v: VChoice,
    pub phi: PhiConfig,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            blocks: None,
            inner: None,
            v: VChoice::Named("m0".into()),
            phi: PhiConfig::default(),
        }
    }
}

/// φ by family name.
///
/// `eps` and `coeffs` describe φ in the variable `s = β/α` with `v` rescaled
/// to α-length 1. `t` (randers only) means `F = α + t <·, v>_α` with `v` as
/// given, and requires the KVCL conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhiConfig {
    pub family: String,
    pub eps: Option<f64>,
    pub t: Option<f64>,
    pub coeffs: Option<Vec<f64>>,
}

impl Default for PhiConfig {
    fn default() -> Self {
        PhiConfig {
            family: "riemannian".into(),
            eps: None,
            t: None,
            coeffs: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Flagpoles sampled by each flag-curvature scan.
    pub flag_samples: usize,
    /// Coordinate-search sweeps, both for flag scans and the scalar search.
    pub refine_iters: usize,
    pub tol: f64,
    /// Rays for the S-curvature scan.
    pub s_samples: usize,
    /// Points per oracle suite case.
    pub oracle_points: usize,
    /// Scalar grid for `search-metric`.
    pub grid: Vec<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            flag_samples: 2000,
            refine_iters: 20,
            tol: 1e-7,
            s_samples: 500,
            oracle_points: 20,
            grid: DEFAULT_GRID.to_vec(),
        }
    }
}

impl ScanConfig {
    pub fn minimizer(&self, seed: u64) -> MinimizerConfig {
        MinimizerConfig {
            samples: self.flag_samples.max(1),
            refine_iters: self.refine_iters,
            tol: self.tol,
            seed,
            ..MinimizerConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub enable: Vec<String>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            enable: SUITES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(s) = self.oracle.enable.iter().find(|s| !SUITES.contains(&s.as_str())) {
            return Err(Error::Config(format!("unknown oracle suite '{s}'")));
        }
        if self.scan.grid.is_empty() || self.scan.grid.iter().any(|c| !(*c > 0.0)) {
            return Err(Error::Config("scan.grid needs positive entries".into()));
        }
        if !(self.scan.tol > 0.0) {
            return Err(Error::Config("scan.tol must be positive".into()));
        }
        let phi = &self.metric.phi;
        match phi.family.as_str() {
            "riemannian" | "sqrt-quadratic" => {}
            "randers" => {
                if phi.eps.is_some() == phi.t.is_some() {
                    return Err(Error::Config("randers needs exactly one of eps and t".into()));
                }
            }
            "polynomial" => {
                if phi.coeffs.as_ref().is_none_or(|c| c.is_empty()) {
                    return Err(Error::Config("polynomial phi needs coeffs".into()));
                }
            }
            other => return Err(Error::Config(format!("unknown phi family '{other}'"))),
        }
        if phi.family != "randers" && (phi.eps.is_some() || phi.t.is_some()) {
            return Err(Error::Config(format!("eps and t apply to randers only, not {}", phi.family)));
        }
        Ok(())
    }
}

/// Space, α and the (α,β)-metric described by a config.
#[derive(Clone, Debug)]
pub struct BuiltMetric {
    pub space: Arc<CosetSpace>,
    pub alpha: RiemannianHomMetric,
    pub metric: InvariantABMetric,
    pub scalars: Option<Vec<f64>>,
}

pub fn build_space(cfg: &SpaceConfig) -> Result<Arc<CosetSpace>> {
    Ok(Arc::new(build_case(&cfg.params())?))
}

pub fn resolve_v(space: &CosetSpace, v: &VChoice) -> Result<Vec<f64>> {
    match v {
        VChoice::Named(name) if name == "m0" => space
            .default_v
            .clone()
            .ok_or_else(|| Error::Config(format!("{} has no default direction", space.label))),
        VChoice::Named(name) => Err(Error::Config(format!("unknown direction '{name}'"))),
        VChoice::Coords(c) if c.len() == space.n() => Ok(c.clone()),
        VChoice::Coords(c) => Err(Error::Config(format!(
            "v has {} coordinates, m has dimension {}",
            c.len(),
            space.n()
        ))),
    }
}

pub fn build_metric(space: Arc<CosetSpace>, cfg: &MetricConfig) -> Result<BuiltMetric> {
    let n = space.n();
    let (inner, scalars) = match (&cfg.inner, &cfg.blocks) {
        (Some(rows), _) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Config(format!("metric.inner must be {n} x {n}")));
            }
            (DenseMatrix::from_rows(rows), None)
        }
        (None, Some(c)) => (space.block_inner(c)?, Some(c.clone())),
        (None, None) if space.blocks.is_empty() => (space.bi_invariant_inner(), None),
        (None, None) => {
            let c = vec![1.0; space.blocks.len()];
            (space.block_inner(&c)?, Some(c))
        }
    };
    let alpha = RiemannianHomMetric::new(space.clone(), inner.clone())?;
    let v = resolve_v(&space, &cfg.v)?;
    let b = inner.bilinear(&v, &v).sqrt();
    if !(b > 0.0) {
        return Err(Error::Config("v must be nonzero".into()));
    }
    let unit: Vec<f64> = v.iter().map(|x| x / b).collect();
    let phi = &cfg.phi;
    let metric = match phi.family.as_str() {
        "riemannian" => InvariantABMetric::new(space.clone(), inner, v, PhiFunction::riemannian())?,
        "sqrt-quadratic" => InvariantABMetric::new(space.clone(), inner, unit, PhiFunction::sqrt_quadratic())?,
        "polynomial" => InvariantABMetric::new(
            space.clone(),
            inner,
            unit,
            PhiFunction::polynomial(phi.coeffs.clone().unwrap_or_default()),
        )?,
        "randers" => match (phi.eps, phi.t) {
            (Some(eps), None) => InvariantABMetric::new(space.clone(), inner, unit, PhiFunction::randers(eps))?,
            (None, Some(t)) => randers_perturb(&alpha, &v, t)?,
            _ => return Err(Error::Config("randers needs exactly one of eps and t".into())),
        },
        other => return Err(Error::Config(format!("unknown phi family '{other}'"))),
    };
    Ok(BuiltMetric {
        space,
        alpha,
        metric,
        scalars,
    })
}

/// Which coset space a report is about.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseDescriptor {
    pub id: Option<u8>,
    pub label: String,
    pub g: String,
    pub dim_g: usize,
    pub dim_h: usize,
    pub dim_m: usize,
    pub blocks: Vec<String>,
}

impl CaseDescriptor {
    pub fn of(space: &CosetSpace) -> Self {
        CaseDescriptor {
            id: space.case_id,
            label: space.label.clone(),
            g: space.g.name().to_string(),
            dim_g: space.g.dim(),
            dim_h: space.h.dim(),
            dim_m: space.n(),
            blocks: space.blocks.iter().map(|b| b.name.clone()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricDescriptor {
    pub scalars: Option<Vec<f64>>,
    pub v: Vec<f64>,
    /// α-length of `v`.
    pub b: f64,
    pub phi: PhiFunction,
    pub riemannian: bool,
}

impl MetricDescriptor {
    pub fn of(built: &BuiltMetric) -> Self {
        MetricDescriptor {
            scalars: built.scalars.clone(),
            v: built.metric.v.clone(),
            b: built.metric.b(),
            phi: built.metric.phi.clone(),
            riemannian: built.metric.is_riemannian(),
        }
    }
}

/// One pass/fail line of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
    pub witness: Option<Vec<f64>>,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            value: None,
            tolerance: None,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn value(mut self, value: f64, tolerance: Option<f64>) -> Self {
        self.value = Some(value);
        self.tolerance = tolerance;
        self
    }

    pub fn witness(mut self, w: Option<Vec<f64>>) -> Self {
        self.witness = w;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SScan {
    pub rays: usize,
    pub max_abs: f64,
    pub argmax: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagSummary {
    /// `chart` (Finsler spray) or `lie` (bracket formula, Riemannian only).
    pub pipeline: String,
    pub min: f64,
    pub pole: Vec<f64>,
    pub edge: Vec<f64>,
    /// Flagpoles evaluated; each pole is minimized exactly over its planes.
    pub poles: usize,
}

/// Flags `(v, w)` with `w` in a root plane commuting with `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroFlagProbe {
    pub plane: String,
    pub angles: usize,
    pub chart_max_abs: f64,
    pub commuting_pair_max_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub candidates: usize,
    pub skipped: usize,
    pub grid_best: Vec<f64>,
    pub refined: Vec<f64>,
    pub lie_min: f64,
    pub poles: usize,
    pub randers_t: f64,
    pub found: bool,
}

/// Largest residual of one oracle comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub suite: String,
    pub case: String,
    pub points: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleRow {
    pub fn new(suite: &str, case: &str, points: usize, max_residual: f64, tolerance: f64) -> Self {
        OracleRow {
            suite: suite.into(),
            case: case.into(),
            points,
            max_residual,
            tolerance,
            pass: max_residual.is_finite() && max_residual < tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub command: String,
    pub case: Option<CaseDescriptor>,
    pub metric: Option<MetricDescriptor>,
    pub checks: Vec<Check>,
    pub s_curvature: Option<SScan>,
    pub flag_curvature: Option<FlagSummary>,
    pub zero_flag: Option<ZeroFlagProbe>,
    pub search: Option<SearchSummary>,
    pub oracle: Vec<OracleRow>,
    pub pass: bool,
    pub config: RunConfig,
    pub wall_time_s: f64,
}

impl CurvatureReport {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        CurvatureReport {
            command: command.into(),
            case: None,
            metric: None,
            checks: Vec::new(),
            s_curvature: None,
            flag_curvature: None,
            zero_flag: None,
            search: None,
            oracle: Vec::new(),
            pass: false,
            config: config.clone(),
            wall_time_s: 0.0,
        }
    }

    /// Sets `pass` from the checks and oracle rows.
    pub fn settle(&mut self) {
        self.pass = self.checks.iter().all(|c| c.pass) && self.oracle.iter().all(|o| o.pass);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        render::report_text(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogReport {
    pub cases: Vec<CatalogCase>,
    pub admissible: usize,
}

impl CatalogReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes")
    }

    pub fn render_text(&self) -> String {
        render::catalog_text(self)
    }
}

/// Process exit code: 0 pass, 1 a check failed, 2 config or structural error.
pub fn exit_code(outcome: &Result<CurvatureReport>) -> i32 {
    match outcome {
        Ok(r) if r.pass => 0,
        Ok(_) => 1,
        Err(_) => 2,
    }
}
