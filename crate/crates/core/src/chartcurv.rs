//! Finsler calculus in exponential coordinates around the origin.
//!
//! The chart is `x ↦ exp(ι x)·o`. Left translation back to the origin turns a
//! chart tangent vector `y` at `x` into `M(x) y ∈ m`, where
//! `M(x) = pr_m A(ι x) ι` and `A(X) = Σ (-ad X)^k/(k+1)!`, so an invariant norm
//! reads `F(x, y) = F0(M(x) y)`. All derivatives are exact jet derivatives.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homspace::{CosetSpace, InvariantABMetric, RiemannianHomMetric};
use crate::minkowski::{ABNormData, PhiFunction};
use crate::numkernel::jet::{layout, Jet};
use crate::numkernel::linalg::{axpy, cholesky, nullspace, orthonormalize, sym_eigen, DenseMatrix};
use crate::numkernel::minimize::{minimize_on_spheres, MinimizerConfig};
use crate::numkernel::par::map_indexed;
use crate::numkernel::quadrature::{unit_ball_volume, SphereRule};
use crate::numkernel::scalar::Scalar;
use crate::numkernel::series::{transport_columns, SERIES_TOL};

/// Largest admissible `|x|` (Euclidean in chart coordinates).
pub const CHART_RADIUS: f64 = 0.5;

/// Exponential chart of a coset space.
#[derive(Clone, Debug)]
pub struct ChartContext {
    pub space: Arc<CosetSpace>,
    pub r_max: f64,
    pub tol: f64,
    incl: DenseMatrix<f64>,
}

/// Norm data of a Riemannian metric (φ ≡ 1).
pub fn riemannian_data(metric: &RiemannianHomMetric) -> ABNormData {
    ABNormData {
        a: metric.inner.clone(),
        v: vec![0.0; metric.n()],
        phi: PhiFunction::riemannian(),
    }
}

impl ChartContext {
    pub fn new(space: Arc<CosetSpace>) -> Self {
        let incl = space.split.inclusion_matrix();
        ChartContext {
            space,
            r_max: CHART_RADIUS,
            tol: SERIES_TOL,
            incl,
        }
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::Dimension(format!(
                "chart point has {} coordinates, chart dimension is {}",
                x.len(),
                self.n()
            )));
        }
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r > self.r_max {
            return Err(Error::ChartRadius {
                norm: r,
                radius: self.r_max,
            });
        }
        Ok(())
    }

    /// `M(x)`, generic in the scalar type.
    pub fn frame<S: Scalar>(&self, x: &[S]) -> Result<DenseMatrix<S>> {
        let sp = &self.space;
        let d = sp.g.dim();
        let n = self.n();
        let mut xg = vec![S::zero(); d];
        for (k, xk) in x.iter().enumerate() {
            for (i, out) in xg.iter_mut().enumerate() {
                let c = self.incl[(i, k)];
                if c != 0.0 {
                    *out = out.clone() + xk.scale(c);
                }
            }
        }
        let adx = sp.g.ad_matrix(&xg);
        let cols = transport_columns(&adx, &DenseMatrix::from_f64(&self.incl), self.tol)?;
        let pr = sp.split.pr_m_matrix();
        Ok(DenseMatrix::from_fn(n, n, |r, c| {
            let mut s = S::zero();
            for i in 0..d {
                let p = pr[(r, i)];
                if p != 0.0 {
                    s = s + cols[(i, c)].scale(p);
                }
            }
            s
        }))
    }

    /// `M` as a jet in the chart variables, of the given order.
    pub fn frame_jet(&self, x: &[f64], order: usize) -> Result<DenseMatrix<Jet>> {
        self.check(x)?;
        let l = layout(self.n(), order);
        let xs: Vec<Jet> = x.iter().enumerate().map(|(i, v)| Jet::variable(l, *v, i)).collect();
        self.frame(&xs)
    }

    /// `F(x, y)`.
    pub fn pullback_norm<S: Scalar>(&self, data: &ABNormData, x: &[S], y: &[S]) -> Result<S> {
        let xv: Vec<f64> = x.iter().map(|s| s.value()).collect();
        self.check(&xv)?;
        let m = self.frame(x)?;
        Ok(data.eval(&m.matvec(y)))
    }

    /// Chart vector at `x` corresponding to the origin vector `u` (so `M(x) y = u`).
    pub fn transport_from_origin(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        self.frame(x)?.solve(u)
    }
}

/// Pieces of `F²` near a point, with `T` carrying (possibly) derivative data.
struct SprayParts<T: Scalar> {
    g: DenseMatrix<T>,
    spray: Vec<T>,
}

/// `G = ¼ g⁻¹ (Σ_k y^k ∂_{x^k}∂_y F² - ∂_x F²)` from `M`, its first partials and `y`.
fn spray_parts<T: Scalar>(data: &ABNormData, m: &DenseMatrix<T>, dm: &[DenseMatrix<T>], y: &[T]) -> Result<SprayParts<T>> {
    let n = y.len();
    let u = m.matvec(y);
    let inner = layout(n, 2);
    let args: Vec<Jet<T>> = u.iter().enumerate().map(|(i, ui)| Jet::variable(inner, ui.clone(), i)).collect();
    let f = data.eval(&args);
    let e = f.clone() * &f;
    let ea: Vec<T> = (0..n).map(|a| e.partial(&[a])).collect();
    let eab = DenseMatrix::from_fn(n, n, |a, b| e.partial(&[a.min(b), a.max(b)]));

    let hm = eab.matmul(m);
    let g = m.transpose().matmul(&hm).scale(0.5);

    let dmy: Vec<Vec<T>> = dm.iter().map(|d| d.matvec(y)).collect();
    // ∂_{x^k} F² and Σ_k y^k ∂_{x^k}∂_{y^l} F²
    let fx: Vec<T> = dmy.iter().map(|w| dot_t(&ea, w)).collect();
    let mut mixed = vec![T::zero(); n];
    for k in 0..n {
        let hdk = eab.matvec(&dmy[k]);
        for (l, out) in mixed.iter_mut().enumerate() {
            let mut s = T::zero();
            for a in 0..n {
                s.mul_add_assign(&hdk[a], &m[(a, l)]);
                s.mul_add_assign(&ea[a], &dm[k][(a, l)]);
            }
            *out = out.clone() + s * &y[k];
        }
    }
    let rhs: Vec<T> = (0..n).map(|l| (mixed[l].clone() - &fx[l]).scale(0.25)).collect();
    let spray = g.solve(&rhs).map_err(|_| Error::Inadmissible {
        y: y.iter().map(|t| t.value()).collect(),
    })?;
    Ok(SprayParts { g, spray })
}

fn dot_t<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b) {
        s.mul_add_assign(x, y);
    }
    s
}

/// Spray coefficients and the partials entering the Riemann operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SprayCoeffs {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub g: Vec<f64>,
    /// `dx[i][k] = ∂_{x^k} G^i`.
    pub dx: Vec<Vec<f64>>,
    /// `dy[i][k] = ∂_{y^k} G^i`.
    pub dy: Vec<Vec<f64>>,
    /// `dxy[i][j][k] = ∂²_{x^j y^k} G^i`.
    pub dxy: Vec<Vec<Vec<f64>>>,
    /// `dyy[i][j][k] = ∂²_{y^j y^k} G^i`.
    pub dyy: Vec<Vec<Vec<f64>>>,
    /// Fundamental tensor at `(x, y)`.
    pub metric: DenseMatrix<f64>,
}

/// Jets of `G`, `g` and `F²` in the `2n` variables `(x, y)`.
struct SprayJets {
    n: usize,
    parts: SprayParts<Jet>,
}

fn spray_jets(ctx: &ChartContext, data: &ABNormData, x: &[f64], y: &[f64], order: usize) -> Result<SprayJets> {
    let n = ctx.n();
    if y.len() != n {
        return Err(Error::Dimension(format!("y has {} entries, chart dimension is {n}", y.len())));
    }
    if y.iter().all(|c| *c == 0.0) {
        return Err(Error::Domain("the spray needs y != 0".into()));
    }
    let mjet = ctx.frame_jet(x, order + 1)?;
    let t = layout(2 * n, order);
    let xmap: Vec<usize> = (0..n).collect();
    let m = mjet.map(|j| j.embed(t, &xmap));
    let dm: Vec<DenseMatrix<Jet>> = (0..n)
        .map(|k| mjet.map(|j| j.derivative(k).embed(t, &xmap)))
        .collect();
    let ys: Vec<Jet> = y.iter().enumerate().map(|(i, v)| Jet::variable(t, *v, n + i)).collect();
    let parts = spray_parts(data, &m, &dm, &ys)?;
    for gi in &parts.spray {
        gi.check_finite()?;
    }
    Ok(SprayJets { n, parts })
}

impl SprayJets {
    fn coeffs(&self, x: &[f64], y: &[f64]) -> SprayCoeffs {
        let n = self.n;
        let gs = &self.parts.spray;
        let p = |i: usize, v: &[usize]| gs[i].partial(v);
        SprayCoeffs {
            x: x.to_vec(),
            y: y.to_vec(),
            g: gs.iter().map(|j| j.value()).collect(),
            dx: (0..n).map(|i| (0..n).map(|k| p(i, &[k])).collect()).collect(),
            dy: (0..n).map(|i| (0..n).map(|k| p(i, &[n + k])).collect()).collect(),
            dxy: (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| p(i, &[j, n + k])).collect()).collect())
                .collect(),
            dyy: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| p(i, &[n + j.min(k), n + j.max(k)])).collect())
                        .collect()
                })
                .collect(),
            metric: self.parts.g.map(|j| j.value()),
        }
    }
}

pub fn spray_coeffs(ctx: &ChartContext, data: &ABNormData, x: &[f64], y: &[f64]) -> Result<SprayCoeffs> {
    Ok(spray_jets(ctx, data, x, y, 2)?.coeffs(x, y))
}

/// Spray values only (used by the integrator).
pub fn spray_values(ctx: &ChartContext, data: &ABNormData, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let mjet = ctx.frame_jet(x, 1)?;
    let n = ctx.n();
    let m = mjet.map(|j| j.value());
    let dm: Vec<DenseMatrix<f64>> = (0..n).map(|k| mjet.map(|j| j.partial(&[k]))).collect();
    Ok(spray_parts(data, &m, &dm, y)?.spray)
}

/// `R_y` at a chart point, with the fundamental tensor used to measure it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiemannOperator {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `r[(i, k)] = R^i_k`.
    pub r: DenseMatrix<f64>,
    pub g: DenseMatrix<f64>,
}

impl SprayCoeffs {
    pub fn riemann(&self) -> RiemannOperator {
        let n = self.y.len();
        let y = &self.y;
        let r = DenseMatrix::from_fn(n, n, |i, k| {
            let mut v = 2.0 * self.dx[i][k];
            for j in 0..n {
                v -= y[j] * self.dxy[i][j][k];
                v += 2.0 * self.g[j] * self.dyy[i][j][k];
                v -= self.dy[i][j] * self.dy[j][k];
            }
            v
        });
        RiemannOperator {
            x: self.x.clone(),
            y: y.clone(),
            r,
            g: self.metric.clone(),
        }
    }
}

pub fn riemann_op(ctx: &ChartContext, data: &ABNormData, x: &[f64], y: &[f64]) -> Result<RiemannOperator> {
    Ok(spray_coeffs(ctx, data, x, y)?.riemann())
}

impl RiemannOperator {
    /// `K(y, w)`.
    pub fn flag(&self, w: &[f64]) -> Result<f64> {
        let g = &self.g;
        let yy = g.bilinear(&self.y, &self.y);
        let ww = g.bilinear(w, w);
        let yw = g.bilinear(&self.y, w);
        let den = yy * ww - yw * yw;
        if den <= 1e-14 * yy * ww {
            return Err(Error::DegenerateFlag);
        }
        Ok(g.bilinear(&self.r.matvec(w), w) / den)
    }

    /// Largest of `|R_y y|` and the asymmetry of `g R` (both relative).
    pub fn consistency_defect(&self) -> f64 {
        let gr = self.g.matmul(&self.r);
        let scale = gr.max_magnitude().max(1e-300);
        let asym = gr.sub(&gr.transpose()).max_magnitude() / scale;
        let ry = self.r.matvec(&self.y);
        let ynorm = self.y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let kill = ry.iter().fold(0.0f64, |m, v| m.max(v.abs())) / (self.r.max_magnitude() * ynorm).max(1e-300);
        asym.max(kill)
    }

    /// Minimum of `K(y, ·)` over planes containing `y`, with a minimizing edge.
    pub fn min_flag(&self) -> Result<(f64, Vec<f64>)> {
        let n = self.y.len();
        let g = &self.g;
        let gy = g.matvec(&self.y);
        let ns = nullspace(&DenseMatrix::from_rows(&[gy]), 1e-12);
        let q = orthonormalize(&(0..ns.cols()).map(|c| ns.col(c)).collect::<Vec<_>>(), g, 1e-12);
        if q.len() + 1 != n {
            return Err(Error::Numeric("complement of the flagpole has wrong dimension".into()));
        }
        let yy = g.bilinear(&self.y, &self.y);
        let gr = g.matmul(&self.r);
        let red = DenseMatrix::from_fn(q.len(), q.len(), |a, b| gr.bilinear(&q[a], &q[b]) / yy).symmetrize();
        let (vals, vecs) = sym_eigen(&red);
        let mut w = vec![0.0; n];
        for (k, qk) in q.iter().enumerate() {
            w = axpy(vecs[(k, 0)], qk, &w);
        }
        Ok((vals[0], w))
    }
}

pub fn flag_curvature(ctx: &ChartContext, data: &ABNormData, x: &[f64], y: &[f64], w: &[f64]) -> Result<f64> {
    riemann_op(ctx, data, x, y)?.flag(w)
}

/// A flag with its curvature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagSample {
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagScan {
    pub min: FlagSample,
    /// Flagpoles evaluated; each is minimized exactly over its planes.
    pub poles: usize,
}

/// Minimum flag curvature at the origin, searching over flagpoles.
pub fn min_flag_curvature(ctx: &ChartContext, data: &ABNormData, config: &MinimizerConfig) -> Result<FlagScan> {
    let n = ctx.n();
    if n < 2 {
        return Err(Error::Dimension("flags need dim m >= 2".into()));
    }
    let origin = vec![0.0; n];
    let frame = orthonormalize(
        &(0..n).map(|i| crate::liealg::unit(n, i)).collect::<Vec<_>>(),
        &data.a,
        1e-12,
    );
    let to_pole = |c: &[f64]| {
        let mut y = vec![0.0; n];
        for (ci, fi) in c.iter().zip(&frame) {
            y = axpy(*ci, fi, &y);
        }
        y
    };
    let res = minimize_on_spheres(
        |p| {
            riemann_op(ctx, data, &origin, &to_pole(&p[0]))
                .and_then(|r| r.min_flag())
                .ok()
                .map(|r| r.0)
        },
        &[n],
        config,
    )?;
    let y = to_pole(&res.point[0]);
    let (value, w) = riemann_op(ctx, data, &origin, &y)?.min_flag()?;
    Ok(FlagScan {
        min: FlagSample { y, w, value },
        poles: res.evaluations,
    })
}

/// Householder vector taking `e_0` (the polar axis of the product rule) to
/// the direction of `β` in the rounded variables, so the rule resolves the
/// only non-constant direction of `φ(s)^{-n}` with its Gauss nodes.
fn beta_axis<S: Scalar>(data: &ABNormData, m: &DenseMatrix<S>, l: &DenseMatrix<S>) -> Result<Option<Vec<f64>>> {
    if data.v.iter().all(|x| *x == 0.0) {
        return Ok(None);
    }
    let mv = m.values();
    let rhs = mv.transpose().matvec(&data.a.matvec(&data.v));
    let w = l.values().solve(&rhs)?;
    let r = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut u: Vec<f64> = w.iter().map(|x| -x / r).collect();
    u[0] += 1.0;
    let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if un < 1e-12 {
        return Ok(None);
    }
    Ok(Some(u.iter().map(|x| x / un).collect()))
}

fn reflect(th: &[f64], u: Option<&[f64]>) -> Vec<f64> {
    match u {
        None => th.to_vec(),
        Some(u) => {
            let d: f64 = th.iter().zip(u).map(|(a, b)| a * b).sum();
            th.iter().zip(u).map(|(a, b)| a - 2.0 * d * b).collect()
        }
    }
}

/// `Vol{y : F(x, y) < 1}` for a fixed frame `M`, generic in the scalar type.
///
/// The sphere integral `(1/n) ∫ F(x, θ)^{-n} dθ` is taken after the linear
/// substitution that makes the Riemannian part round, which leaves the
/// integrand `φ(s)^{-n}` smooth and nearly constant.
fn unit_ball_volume_with<S: Scalar>(data: &ABNormData, m: &DenseMatrix<S>, rule: &SphereRule, parallel: bool) -> Result<S> {
    let n = m.rows();
    let a = DenseMatrix::from_f64(&data.a);
    let ax = m.transpose().matmul(&a).matmul(m);
    let l = cholesky(&ax)?;
    let mut det = S::one();
    for i in 0..n {
        det = det * &l[(i, i)];
    }
    let axis = beta_axis(data, m, &l)?;
    let terms = map_indexed(rule.len(), parallel, |q| {
        let th = reflect(&rule.nodes[q], axis.as_deref());
        // y = L^{-T} θ
        let mut y: Vec<S> = th.iter().map(|t| S::from_f64(*t)).collect();
        for i in (0..n).rev() {
            let mut s = y[i].clone();
            for k in (i + 1)..n {
                let t = l[(k, i)].clone() * &y[k];
                s = s - &t;
            }
            y[i] = s / &l[(i, i)];
        }
        let f = data.eval(&m.matvec(&y));
        let mut p = f.recip();
        let base = p.clone();
        for _ in 1..n {
            p = p * &base;
        }
        p.scale(rule.weights[q])
    });
    let mut sum = S::zero();
    for t in terms {
        sum = sum + &t;
    }
    Ok(sum / &det.scale(n as f64))
}

/// Busemann-Hausdorff density `σ(x) = ω_n / Vol{y : F(x,y) < 1}`.
pub fn bh_density(ctx: &ChartContext, data: &ABNormData, x: &[f64], rule: &SphereRule) -> Result<f64> {
    ctx.check(x)?;
    let m = ctx.frame::<f64>(x)?;
    Ok(unit_ball_volume(ctx.n()) / unit_ball_volume_with(data, &m, rule, true)?)
}

/// Density of a norm on a vector space (no chart).
pub fn bh_density_flat(data: &ABNormData, rule: &SphereRule) -> Result<f64> {
    let n = data.dim();
    Ok(unit_ball_volume(n) / unit_ball_volume_with(data, &DenseMatrix::<f64>::identity(n), rule, true)?)
}

/// `ln σ` as a first-order jet in the chart variables (quadrature run on jets).
pub fn bh_log_density_jet(ctx: &ChartContext, data: &ABNormData, x: &[f64], rule: &SphereRule) -> Result<Jet> {
    let m = ctx.frame_jet(x, 1)?;
    let vol = unit_ball_volume_with(data, &m, rule, true)?;
    let out = vol.ln().scale(-1.0).add_f64(unit_ball_volume(ctx.n()).ln());
    out.check_finite()?;
    Ok(out)
}

/// Default sphere rule for the density quadrature.
pub fn default_density_rule(n: usize) -> SphereRule {
    let m = match n {
        0..=2 => 24,
        3 => 16,
        4 => 12,
        5 => 8,
        _ => 6,
    };
    SphereRule::product_gauss(n, m)
}

/// S-curvature from its definition: the derivative of the distortion
/// `τ = ln(√det g_y / σ(x))` along the spray.
pub fn s_curvature_chart(ctx: &ChartContext, data: &ABNormData, x: &[f64], y: &[f64], rule: &SphereRule) -> Result<f64> {
    let n = ctx.n();
    let jets = spray_jets(ctx, data, x, y, 1)?;
    let det = jets.parts.g.det()?;
    let half_log_det = det.ln().scale(0.5);
    let sigma = bh_log_density_jet(ctx, data, x, rule)?;
    let mut s = 0.0;
    for k in 0..n {
        let dtau_x = half_log_det.partial(&[k]) - sigma.partial(&[k]);
        let dtau_y = half_log_det.partial(&[n + k]);
        s += y[k] * dtau_x - 2.0 * jets.parts.spray[k].value() * dtau_y;
    }
    Ok(s)
}

/// Result of integrating the geodesic equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub t: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    /// `F(c, ċ)` at each step.
    pub speed: Vec<f64>,
    /// Set when the path left the chart before the horizon.
    pub exited: bool,
}

impl GeodesicPath {
    /// Largest `|F - F(0)|`.
    pub fn speed_drift(&self) -> f64 {
        let s0 = self.speed[0];
        self.speed.iter().fold(0.0f64, |m, s| m.max((s - s0).abs()))
    }
}

/// RK4 for `ẍ + 2 G(x, ẋ) = 0`.
pub fn geodesic_integrate(ctx: &ChartContext, data: &ABNormData, x0: &[f64], y0: &[f64], horizon: f64, steps: usize) -> Result<GeodesicPath> {
    let n = ctx.n();
    ctx.check(x0)?;
    let h = horizon / steps.max(1) as f64;
    let accel = |x: &[f64], y: &[f64]| -> Result<Vec<f64>> {
        Ok(spray_values(ctx, data, x, y)?.iter().map(|g| -2.0 * g).collect())
    };
    let speed = |x: &[f64], y: &[f64]| -> Result<f64> { ctx.pullback_norm(data, x, y) };
    let mut path = GeodesicPath {
        t: vec![0.0],
        x: vec![x0.to_vec()],
        y: vec![y0.to_vec()],
        speed: vec![speed(x0, y0)?],
        exited: false,
    };
    let (mut x, mut y) = (x0.to_vec(), y0.to_vec());
    let comb = |base: &[f64], d: &[f64], s: f64| -> Vec<f64> { axpy(s, d, base) };
    for step in 1..=steps {
        let stage = |x: &[f64], y: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> { Ok((y.to_vec(), accel(x, y)?)) };
        let run = || -> Result<(Vec<f64>, Vec<f64>)> {
            let (k1x, k1y) = stage(&x, &y)?;
            let (k2x, k2y) = stage(&comb(&x, &k1x, h / 2.0), &comb(&y, &k1y, h / 2.0))?;
            let (k3x, k3y) = stage(&comb(&x, &k2x, h / 2.0), &comb(&y, &k2y, h / 2.0))?;
            let (k4x, k4y) = stage(&comb(&x, &k3x, h), &comb(&y, &k3y, h))?;
            let nx: Vec<f64> = (0..n).map(|i| x[i] + h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i])).collect();
            let ny: Vec<f64> = (0..n).map(|i| y[i] + h / 6.0 * (k1y[i] + 2.0 * k2y[i] + 2.0 * k3y[i] + k4y[i])).collect();
            Ok((nx, ny))
        };
        match run() {
            Ok((nx, ny)) => {
                if ctx.check(&nx).is_err() {
                    path.exited = true;
                    break;
                }
                x = nx;
                y = ny;
            }
            Err(Error::ChartRadius { .. }) => {
                path.exited = true;
                break;
            }
            Err(e) => return Err(e),
        }
        path.t.push(step as f64 * h);
        path.speed.push(speed(&x, &y)?);
        path.x.push(x.clone());
        path.y.push(y.clone());
    }
    Ok(path)
}

/// Residuals of the localization identity at each tested point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub points: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Compares `R^F` at `y = V(x)` with the Riemann operator of the localized
/// metric `g_V` at the origin and at the given chart points.
pub fn riemannian_localization_check(ctx: &ChartContext, metric: &InvariantABMetric, points: &[Vec<f64>]) -> Result<LocalizationReport> {
    let gv = crate::homspace::localize_gv(metric)?;
    let fdata = metric.norm_data();
    let gdata = riemannian_data(&gv);
    let mut all = vec![vec![0.0; ctx.n()]];
    all.extend(points.iter().cloned());
    let residuals = map_indexed(all.len(), true, |i| -> Result<f64> {
        let x = &all[i];
        let y = ctx.transport_from_origin(x, &metric.v)?;
        let rf = riemann_op(ctx, &fdata, x, &y)?.r;
        let rg = riemann_op(ctx, &gdata, x, &y)?.r;
        let num = frob(&rf.sub(&rg));
        Ok(num / frob(&rg).max(1e-300))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(LocalizationReport {
        points: all,
        residuals,
        max_residual,
    })
}

fn frob(m: &DenseMatrix<f64>) -> f64 {
    m.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Levi-Civita data of a Riemannian metric in the chart, computed directly
/// from the metric matrix field `g(x) = M(x)ᵀ a M(x)`.
#[derive(Clone, Debug)]
pub struct ChristoffelData {
    pub g: DenseMatrix<f64>,
    /// `gamma[i][j][k] = Γ^i_{jk}`.
    pub gamma: Vec<Vec<Vec<f64>>>,
    /// `riem[i][j][k][l] = R^i_{jkl}`, `R(∂_k, ∂_l)∂_j = R^i_{jkl} ∂_i`.
    pub riem: Vec<Vec<Vec<Vec<f64>>>>,
}

pub fn christoffel(ctx: &ChartContext, a: &DenseMatrix<f64>, x: &[f64]) -> Result<ChristoffelData> {
    let n = ctx.n();
    let mjet = ctx.frame_jet(x, 2)?;
    let aj = DenseMatrix::<Jet>::from_f64(a);
    let g = mjet.transpose().matmul(&aj).matmul(&mjet);
    let ginv = g.inverse()?.map(|j| j.truncate(1));
    let dg: Vec<DenseMatrix<Jet>> = (0..n).map(|l| g.map(|j| j.derivative(l))).collect();
    // Γ^i_{jk} as first-order jets
    let mut gam: Vec<Vec<Vec<Jet>>> = vec![vec![vec![Jet::constant(0.0); n]; n]; n];
    for j in 0..n {
        for k in 0..n {
            let low: Vec<Jet> = (0..n)
                .map(|l| (dg[j][(l, k)].clone() + &dg[k][(l, j)] - &dg[l][(j, k)]).scale(0.5))
                .collect();
            for (i, out) in gam.iter_mut().enumerate() {
                let mut s = Jet::constant(0.0);
                for (l, lo) in low.iter().enumerate() {
                    s.mul_add_assign(&ginv[(i, l)], lo);
                }
                out[j][k] = s;
            }
        }
    }
    let gv: Vec<Vec<Vec<f64>>> = gam
        .iter()
        .map(|a| a.iter().map(|b| b.iter().map(|c| c.value()).collect()).collect())
        .collect();
    let d = |i: usize, j: usize, k: usize, v: usize| gam[i][j][k].partial(&[v]);
    let mut riem = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut r = d(i, l, j, k) - d(i, k, j, l);
                    for m in 0..n {
                        r += gv[i][k][m] * gv[m][l][j] - gv[i][l][m] * gv[m][k][j];
                    }
                    riem[i][j][k][l] = r;
                }
            }
        }
    }
    Ok(ChristoffelData {
        g: g.map(|j| j.value()),
        gamma: gv,
        riem,
    })
}

impl ChristoffelData {
    /// `½ Γ^i_{jk} y^j y^k`.
    pub fn spray(&self, y: &[f64]) -> Vec<f64> {
        let n = y.len();
        (0..n)
            .map(|i| {
                let mut s = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        s += self.gamma[i][j][k] * y[j] * y[k];
                    }
                }
                0.5 * s
            })
            .collect()
    }

    /// `R(·, y) y` as a matrix.
    pub fn riemann_op(&self, y: &[f64]) -> DenseMatrix<f64> {
        let n = y.len();
        DenseMatrix::from_fn(n, n, |i, k| {
            let mut s = 0.0;
            for j in 0..n {
                for l in 0..n {
                    s += self.riem[i][j][k][l] * y[j] * y[l];
                }
            }
            s
        })
    }

    pub fn sectional(&self, u: &[f64], w: &[f64]) -> Result<f64> {
        let r = self.riemann_op(u);
        let g = &self.g;
        let den = g.bilinear(u, u) * g.bilinear(w, w) - g.bilinear(u, w).powi(2);
        if den <= 1e-14 * g.bilinear(u, u) * g.bilinear(w, w) {
            return Err(Error::DegenerateFlag);
        }
        Ok(g.bilinear(&r.matvec(w), w) / den)
    }
}
