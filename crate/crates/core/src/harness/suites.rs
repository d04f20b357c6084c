//! Oracle suites: each compares two independent computations of the same
//! quantity on a fixed set of spaces and reports the largest residual.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::commands::{structural_rows, zero_flag_probe};
use super::{Check, OracleRow};
use crate::chartcurv::{
    christoffel, default_density_rule, flag_curvature, riemannian_data, riemannian_localization_check,
    s_curvature_chart, ChartContext,
};
use crate::error::{Error, Result};
use crate::homspace::catalog::build_case;
use crate::homspace::{
    kvcl_check, lie_sectional, randers_perturb, s_curvature_hom, structural_checks, submersion_ratio, CaseParams,
    CosetSpace, InvariantABMetric, RiemannianHomMetric,
};
use crate::liealg::{build_algebra, unit, AlgebraSpec, BasisKind, ReductiveSplit, Subalgebra};
use crate::minkowski::PhiFunction;
use crate::numkernel::linalg::{axpy, norm};
use crate::numkernel::map_indexed;

/// Generic block scalars for `S_{1,1}` in the oracle suites.
pub const S11_SCALARS: [f64; 4] = [0.5, 0.7, 1.0, 0.85];

/// Chart points are drawn from this ball.
pub const ORACLE_RADIUS: f64 = 0.3;

pub const S_ORACLE_TOL: f64 = 1e-6;
pub const LOCALIZATION_TOL: f64 = 1e-6;
pub const ZERO_FLAG_TOL: f64 = 1e-6;
pub const RIEMANNIAN_TOL: f64 = 1e-7;
pub const QUARTER_TOL: f64 = 1e-8;
pub const SUBMERSION_TOL: f64 = 1e-8;

pub fn case_space(p: CaseParams) -> Result<Arc<CosetSpace>> {
    Ok(Arc::new(build_case(&p)?))
}

pub fn su2_space() -> Result<Arc<CosetSpace>> {
    Ok(Arc::new(CosetSpace::lie_group(build_algebra(&AlgebraSpec::Su(2))?)?))
}

pub fn s11_space() -> Result<Arc<CosetSpace>> {
    case_space(CaseParams {
        case: 6,
        k: 1,
        l: 1,
        ..CaseParams::default()
    })
}

fn unit_alpha(space: &CosetSpace, inner: &crate::numkernel::DenseMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let _ = space;
    let b = inner.bilinear(v, v).sqrt();
    v.iter().map(|x| x / b).collect()
}

/// SU(2) with `α = diag(1,2,3)` and `φ = 1 + 0.3 s` along `e_1` (not KVCL).
pub fn su2_randers() -> Result<InvariantABMetric> {
    let sp = su2_space()?;
    let a = sp.block_inner(&[1.0, 2.0, 3.0])?;
    let v = unit_alpha(&sp, &a, &[1.0, 0.0, 0.0]);
    InvariantABMetric::new(sp, a, v, PhiFunction::randers(0.3))
}

/// `S_{1,1}` with `v` tilted from `m0` into the `h`-fixed root plane (not KVCL).
pub fn s11_randers() -> Result<InvariantABMetric> {
    let sp = s11_space()?;
    let a = sp.block_inner(&S11_SCALARS)?;
    let tilt = &sp.blocks[1].vectors[0];
    let v = axpy(0.6, tilt, &sp.default_v.clone().unwrap_or_else(|| unit(sp.n(), 0)));
    let v = unit_alpha(&sp, &a, &v);
    InvariantABMetric::new(sp, a, v, PhiFunction::randers(0.3))
}

/// Berger SU(2), `α = diag(1,1,2)`, `F = α + t β` along `e_3` with `t b = 0.3`.
pub fn su2_randers_kvcl() -> Result<InvariantABMetric> {
    let sp = su2_space()?;
    let alpha = RiemannianHomMetric::new(sp.clone(), sp.block_inner(&[1.0, 1.0, 2.0])?)?;
    let v = vec![0.0, 0.0, 1.0];
    let b = alpha.inner.bilinear(&v, &v).sqrt();
    randers_perturb(&alpha, &v, 0.3 / b)
}

/// `S_{1,1}` with block scalars [`S11_SCALARS`] and `F = α + t β` along `m0`.
pub fn s11_randers_kvcl() -> Result<InvariantABMetric> {
    let sp = s11_space()?;
    let alpha = RiemannianHomMetric::new(sp.clone(), sp.block_inner(&S11_SCALARS)?)?;
    let v = sp.default_v.clone().unwrap_or_else(|| unit(sp.n(), 0));
    let b = alpha.inner.bilinear(&v, &v).sqrt();
    randers_perturb(&alpha, &v, 0.3 / b)
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            // Box-Muller
            let u1: f64 = rng.random::<f64>().max(1e-300);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        })
        .collect()
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let g = gaussian(rng, n);
    let r = norm(&g);
    g.iter().map(|x| x / r).collect()
}

/// `count` chart points: the origin, then uniform points of the ball of
/// radius [`ORACLE_RADIUS`].
pub fn chart_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            if i == 0 {
                return vec![0.0; n];
            }
            let d = unit_vector(&mut rng, n);
            let r = ORACLE_RADIUS * rng.random::<f64>().powf(1.0 / n as f64);
            d.iter().map(|x| x * r).collect()
        })
        .collect()
}

/// Largest `|a - b| / |b|`.
fn max_relative(pairs: &[(f64, f64)]) -> f64 {
    pairs
        .iter()
        .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Chart S-curvature at `(x, M(x)^{-1} u)` against the closed form at `u`.
pub fn s_curvature_pairs(metric: &InvariantABMetric, points: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let n = metric.n();
    let ctx = ChartContext::new(metric.space.clone());
    let rule = default_density_rule(n);
    let data = metric.norm_data();
    let xs = chart_points(n, points, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5c);
    let us: Vec<Vec<f64>> = (0..points).map(|_| unit_vector(&mut rng, n)).collect();
    let mut out = Vec::with_capacity(points);
    for (x, u) in xs.iter().zip(&us) {
        let y = ctx.transport_from_origin(x, u)?;
        let chart = s_curvature_chart(&ctx, &data, x, &y, &rule)?;
        out.push((chart, s_curvature_hom(metric, u)?));
    }
    Ok(out)
}

pub fn s_curvature_suite(points: usize, seed: u64) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for (name, m) in [("su(2) diag(1,2,3) randers", su2_randers()?), ("S_{1,1} randers", s11_randers()?)] {
        let pairs = s_curvature_pairs(&m, points, seed)?;
        rows.push(OracleRow::new("s-curvature", name, points, max_relative(&pairs), S_ORACLE_TOL));
    }
    Ok(rows)
}

/// `points` includes the origin.
pub fn localization_suite(points: usize, seed: u64) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for (name, m) in [("su(2) berger randers", su2_randers_kvcl()?), ("S_{1,1} randers", s11_randers_kvcl()?)] {
        let ctx = ChartContext::new(m.space.clone());
        let pts = chart_points(m.n(), points.max(1), seed);
        let rep = riemannian_localization_check(&ctx, &m, &pts[1..])?;
        rows.push(OracleRow::new(
            "localization",
            name,
            rep.points.len(),
            rep.max_residual,
            LOCALIZATION_TOL,
        ));
    }
    Ok(rows)
}

/// The two zero-flag families: a circle inside an `SU(2)` and a `T^2` of
/// `U(3)` meeting `SU(3)` in such a circle.
pub fn zero_flag_spaces() -> Result<Vec<(String, Arc<CosetSpace>)>> {
    Ok(vec![
        (
            "SU(3)/U(1), circle (1,-1,0)".into(),
            case_space(CaseParams {
                case: 6,
                k: 1,
                l: -1,
                negative_control: true,
                ..CaseParams::default()
            })?,
        ),
        (
            "U(3)/T^2, T^2 = <(1,-1,0), (0,0,1)>".into(),
            case_space(CaseParams {
                case: 7,
                torus: Some([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]]),
                negative_control: true,
                ..CaseParams::default()
            })?,
        ),
    ])
}

/// Random KVCL Randers metrics on a zero-flag space: block scalars in
/// `[0.3, 1.5]`, `φ = 1 + eps s` with `eps` in `[0.05, 0.5]`, `v` along `m0`.
pub fn random_kvcl_randers(space: &Arc<CosetSpace>, rng: &mut ChaCha8Rng) -> Result<InvariantABMetric> {
    let c: Vec<f64> = (0..space.blocks.len()).map(|_| rng.random_range(0.3..1.5)).collect();
    let eps = rng.random_range(0.05..0.5);
    let a = space.block_inner(&c)?;
    let v = space.default_v.clone().unwrap_or_else(|| unit(space.n(), 0));
    let v = unit_alpha(space, &a, &v);
    InvariantABMetric::new(space.clone(), a, v, PhiFunction::randers(eps))
}

pub fn zero_flag_suite(trials: usize, seed: u64) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, sp) in zero_flag_spaces()? {
        let mut chart: f64 = 0.0;
        let mut pair: f64 = 0.0;
        for _ in 0..trials.max(1) {
            let m = random_kvcl_randers(&sp, &mut rng)?;
            if !kvcl_check(&m).pass {
                return Err(Error::Precondition(format!("{name}: block metric fails KVCL")));
            }
            match zero_flag_probe(&m, 12)? {
                Some(p) => {
                    chart = chart.max(p.chart_max_abs);
                    pair = pair.max(p.commuting_pair_max_abs);
                }
                None => {
                    chart = f64::INFINITY;
                    pair = f64::INFINITY;
                }
            }
        }
        rows.push(OracleRow::new("zero-flag/chart", &name, trials, chart, ZERO_FLAG_TOL));
        rows.push(OracleRow::new("zero-flag/commuting-pair", &name, trials, pair, ZERO_FLAG_TOL));
    }
    Ok(rows)
}

/// `φ ≡ 1` test metrics: bi-invariant `S^3`, a Berger `S^5` and `S_{1,1}`.
pub fn riemannian_cases() -> Result<Vec<(String, RiemannianHomMetric)>> {
    let s3 = case_space(CaseParams::default())?;
    let s5 = case_space(CaseParams {
        n: 2,
        ..CaseParams::default()
    })?;
    let s11 = s11_space()?;
    Ok(vec![
        ("S^3 bi-invariant".into(), RiemannianHomMetric::new(s3.clone(), s3.block_inner(&[1.0, 1.0])?)?),
        ("S^5 = SU(3)/SU(2)".into(), RiemannianHomMetric::new(s5.clone(), s5.block_inner(&[0.8, 1.0])?)?),
        ("S_{1,1}".into(), RiemannianHomMetric::new(s11.clone(), s11.block_inner(&S11_SCALARS)?)?),
    ])
}

/// Flag curvature through the spray pipeline and through Christoffel symbols
/// at random chart points, plus the bracket formula at the origin.
#[derive(Clone, Debug)]
pub struct RiemannianSample {
    pub x: Vec<f64>,
    pub chart: f64,
    pub christoffel: f64,
    pub chart_origin: f64,
    pub lie_origin: f64,
}

pub fn riemannian_samples(metric: &RiemannianHomMetric, flags: usize, seed: u64) -> Result<Vec<RiemannianSample>> {
    let n = metric.n();
    let ctx = ChartContext::new(metric.space.clone());
    let data = riemannian_data(metric);
    let xs = chart_points(n, flags, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf1a6);
    let yw: Vec<(Vec<f64>, Vec<f64>)> = (0..flags).map(|_| (gaussian(&mut rng, n), gaussian(&mut rng, n))).collect();
    let origin = vec![0.0; n];
    map_indexed(flags, true, |i| -> Result<RiemannianSample> {
        let (x, (y, w)) = (&xs[i], &yw[i]);
        Ok(RiemannianSample {
            x: x.clone(),
            chart: flag_curvature(&ctx, &data, x, y, w)?,
            christoffel: christoffel(&ctx, &metric.inner, x)?.sectional(y, w)?,
            chart_origin: flag_curvature(&ctx, &data, &origin, y, w)?,
            lie_origin: lie_sectional(metric, y, w)?,
        })
    })
    .into_iter()
    .collect()
}

pub fn riemannian_suite(flags: usize, seed: u64) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for (name, m) in riemannian_cases()? {
        let s = riemannian_samples(&m, flags, seed)?;
        let chr: Vec<(f64, f64)> = s.iter().map(|r| (r.chart, r.christoffel)).collect();
        let lie: Vec<(f64, f64)> = s.iter().map(|r| (r.chart_origin, r.lie_origin)).collect();
        rows.push(OracleRow::new("riemannian/christoffel", &name, flags, max_relative(&chr), RIEMANNIAN_TOL));
        rows.push(OracleRow::new("riemannian/lie", &name, flags, max_relative(&lie), RIEMANNIAN_TOL));
        if name.starts_with("S^3") {
            let dev = s.iter().map(|r| (r.chart - 0.25).abs()).fold(0.0, f64::max);
            rows.push(OracleRow::new("riemannian/quarter", &name, flags, dev, QUARTER_TOL));
        }
    }
    Ok(rows)
}

/// Admissible members checked by the structural suite.
pub fn admissible_members() -> Vec<CaseParams> {
    let p = |case: u8, n: usize, k: i64, l: i64, torus: Option<[[f64; 3]; 2]>| CaseParams {
        case,
        n,
        k,
        l,
        torus,
        negative_control: false,
    };
    vec![
        p(1, 1, 1, 1, None),
        p(1, 2, 1, 1, None),
        p(2, 1, 1, 1, None),
        p(2, 2, 1, 1, None),
        p(3, 1, 1, 1, None),
        p(4, 1, 1, 1, None),
        p(6, 1, 1, 1, None),
        p(6, 1, 2, 1, None),
        p(6, 1, 3, -1, None),
        p(7, 1, 1, 1, None),
        p(7, 1, 1, 1, Some([[2.0, 1.0, -3.0], [1.0, 1.0, 0.0]])),
    ]
}

/// Members the classification must reject, with the rejecting stage.
pub fn excluded_members() -> Vec<CaseParams> {
    let mut v: Vec<CaseParams> = [5u8, 8, 9, 10]
        .iter()
        .map(|&case| CaseParams {
            case,
            ..CaseParams::default()
        })
        .collect();
    v.push(CaseParams {
        case: 6,
        k: 1,
        l: 0,
        ..CaseParams::default()
    });
    v.push(CaseParams {
        case: 6,
        k: 1,
        l: -1,
        ..CaseParams::default()
    });
    v.push(CaseParams {
        case: 7,
        torus: Some([[1.0, -1.0, 0.0], [0.0, 1.0, -1.0]]),
        ..CaseParams::default()
    });
    v.push(CaseParams {
        case: 7,
        torus: Some([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]]),
        ..CaseParams::default()
    });
    v
}

/// `G = SU(3)`, `H = {e}`: rank 2 against rank 0.
pub fn control_su3_group() -> Result<(Arc<CosetSpace>, Vec<f64>)> {
    let sp = Arc::new(CosetSpace::lie_group(build_algebra(&AlgebraSpec::Su(3))?)?);
    let v = unit(sp.n(), 0);
    Ok((sp, v))
}

/// `su(2)+R^2` over a torus containing one `R` factor; `v` spans the other.
pub fn control_h_with_ideal() -> Result<(Arc<CosetSpace>, Vec<f64>)> {
    let g = build_algebra(&AlgebraSpec::parse("su(2)+R^2")?)?;
    let d = g.dim();
    let cart = (0..d).find(|&i| g.kinds()[i] == BasisKind::Cartan);
    let ab: Vec<usize> = (0..d).filter(|&i| g.kinds()[i] == BasisKind::Abelian).collect();
    let (Some(c), [a1, a2]) = (cart, ab.as_slice()) else {
        return Err(Error::Numeric("unexpected basis for su(2)+R^2".into()));
    };
    let h = Subalgebra::new(&g, &[unit(d, c), unit(d, *a1)])?;
    let split = ReductiveSplit::new(&g, &h, g.form())?;
    let vg = unit(d, *a2);
    let sp = CosetSpace::new(g, h, split, "(SU(2) x T^2)/T^2");
    let v = sp.split.m_basis().iter().map(|e| sp.g.inner(e, &vg)).collect();
    Ok((Arc::new(sp), v))
}

/// Structural checks and submersion-ratio constancy on the admissible
/// members, and rejection of every negative control.
pub fn structural_suite(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in admissible_members() {
        let sp = case_space(p.clone())?;
        let a = sp.block_inner(&vec![1.0; sp.blocks.len()])?;
        let v = sp.default_v.clone().unwrap_or_else(|| unit(sp.n(), 0));
        let st = structural_checks(&sp, &a, &v, seed);
        let mut detail = match &st.failure {
            Some(f) => f.clone(),
            None => "rank, ideals, closure and invariance hold".to_string(),
        };
        let alpha = RiemannianHomMetric::new(sp.clone(), a.clone())?;
        let b = a.bilinear(&v, &v).sqrt();
        let f = randers_perturb(&alpha, &v, 0.2 / b)?;
        let r = submersion_ratio(&f, 64, seed)?;
        detail.push_str(&format!("; submersion ratio {:.12} variance {:e}", r.mean, r.variance));
        out.push(
            Check::new(
                &format!("admissible {}", sp.label),
                st.pass && r.variance < SUBMERSION_TOL,
                detail,
            )
            .value(r.variance, Some(SUBMERSION_TOL)),
        );
    }
    for p in excluded_members() {
        let name = format!("excluded case {} (k,l)=({},{}) torus {:?}", p.case, p.k, p.l, p.torus);
        let c = match build_case(&p) {
            Err(Error::Structural(msg)) => Check::new(&name, true, format!("rejected: {msg}")),
            Err(e) => Check::new(&name, false, format!("wrong error kind: {e}")),
            Ok(_) => Check::new(&name, false, "built without complaint"),
        };
        out.push(c);
    }
    for (name, (sp, v)) in [
        ("control SU(3)/{e}", control_su3_group()?),
        ("control (SU(2) x T^2)/T^2", control_h_with_ideal()?),
    ] {
        let st = structural_checks(&sp, &sp.bi_invariant_inner(), &v, seed);
        let rows = structural_rows(&st);
        let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
        out.push(Check::new(
            name,
            !st.pass,
            match &st.failure {
                Some(f) => format!("rejected: {f}; failing checks {failed:?}"),
                None => "passed the structural checks".into(),
            },
        ));
    }
    Ok(out)
}
