//! Invariant (α,β)-metric data on reductive coset spaces `G/H`.
//!
//! Tangent vectors at the origin are `m`-coordinate vectors for the basis
//! stored in the [`ReductiveSplit`]. Everything here is Lie-algebraic and
//! evaluated at the origin; chart-based quantities live in `chartcurv`.

pub mod catalog;
pub mod curvature;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{
    ad_invariance_check, maximal_ideal_in, rank, unit, InvarianceReport, LieAlgebra,
    ReductiveSplit, RootPlaneDecomp, Subalgebra,
};
use crate::minkowski::{
    is_riemannian_phi, positivity_check, q_delta_phi, ABNormData, PhiFunction, POSITIVITY_GRID,
};
use crate::numkernel::linalg::{axpy, is_spd, nullspace, orthonormalize, sym_eigen, DenseMatrix};
use crate::numkernel::minimize::SpherePointSet;
use crate::numkernel::par::map_indexed;

pub use catalog::{catalog, CaseParams, CatalogCase};
pub use curvature::{
    commuting_pair_sectional, lie_jacobi_form, lie_sectional, min_lie_sectional, u_tensor,
};

/// Global factor between the closed-form S-curvature and the definitional
/// chart computation. Measured on the su(2) calibration case with the data
/// normalized to `b = 1`; the two agree with factor one.
pub const S_HOM_CALIBRATION: f64 = 1.0;

/// Tolerance of the linear-algebraic KVCL test.
pub const KVCL_TOL: f64 = 1e-10;

/// A named group of `m`-coordinate vectors (orthonormal for the bi-invariant
/// form) on which default metrics are a single scalar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub vectors: Vec<Vec<f64>>,
}

/// `G/H` at the Lie-algebra level.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    pub g: LieAlgebra,
    pub h: Subalgebra,
    pub split: ReductiveSplit,
    pub label: String,
    pub case_id: Option<u8>,
    /// Block structure of the default metric family (empty if none).
    pub blocks: Vec<Block>,
    /// Default direction for `v` in `m` coordinates.
    pub default_v: Option<Vec<f64>>,
    pub roots: Option<RootPlaneDecomp>,
    /// `mstruct[(a * n + b) * n + c]` is the `c`-th coordinate of `[e_a, e_b]_m`.
    mstruct: Vec<f64>,
}

impl CosetSpace {
    pub fn new(g: LieAlgebra, h: Subalgebra, split: ReductiveSplit, label: impl Into<String>) -> Self {
        let n = split.dim_m();
        let mut mstruct = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                let c = split.bracket_m(&g, &unit(n, a), &unit(n, b));
                mstruct[(a * n + b) * n..(a * n + b + 1) * n].copy_from_slice(&c);
            }
        }
        CosetSpace {
            g,
            h,
            split,
            label: label.into(),
            case_id: None,
            blocks: Vec::new(),
            default_v: None,
            roots: None,
            mstruct,
        }
    }

    /// The group manifold itself (`h = 0`, `m = g`).
    pub fn lie_group(g: LieAlgebra) -> Result<Self> {
        let h = Subalgebra::zero();
        let d = g.dim();
        let split = ReductiveSplit::with_basis(&g, &h, (0..d).map(|i| unit(d, i)).collect())?;
        let label = format!("group {}", g.name());
        let mut s = CosetSpace::new(g, h, split, label);
        s.blocks = (0..d)
            .map(|i| Block {
                name: format!("e{}", i + 1),
                vectors: vec![unit(d, i)],
            })
            .collect();
        Ok(s)
    }

    /// Dimension of `m` (the manifold dimension).
    pub fn n(&self) -> usize {
        self.split.dim_m()
    }

    /// `[y1, y2]_m`.
    pub fn bracket_m(&self, y1: &[f64], y2: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for a in 0..n {
            if y1[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                let w = y1[a] * y2[b];
                if w == 0.0 {
                    continue;
                }
                let base = (a * n + b) * n;
                for (c, o) in out.iter_mut().enumerate() {
                    *o += w * self.mstruct[base + c];
                }
            }
        }
        out
    }

    /// Matrix of `y ↦ [x, y]_m`.
    pub fn ad_m(&self, x: &[f64]) -> DenseMatrix<f64> {
        let n = self.n();
        let mut m = DenseMatrix::zeros(n, n);
        for (a, xa) in x.iter().enumerate() {
            if *xa == 0.0 {
                continue;
            }
            for b in 0..n {
                let base = (a * n + b) * n;
                for c in 0..n {
                    m[(c, b)] += xa * self.mstruct[base + c];
                }
            }
        }
        m
    }

    /// Full bracket of two `m` vectors, in algebra coordinates.
    pub fn bracket_g(&self, y1: &[f64], y2: &[f64]) -> Vec<f64> {
        self.g.bracket(&self.split.embed(y1), &self.split.embed(y2))
    }

    /// Bi-invariant form restricted to `m`.
    pub fn bi_invariant_inner(&self) -> DenseMatrix<f64> {
        let n = self.n();
        let mb = self.split.m_basis();
        DenseMatrix::from_fn(n, n, |i, j| self.g.inner(&mb[i], &mb[j]))
    }

    /// `sum_i c_i P_i` over the blocks.
    pub fn block_inner(&self, scalars: &[f64]) -> Result<DenseMatrix<f64>> {
        if self.blocks.is_empty() {
            return Err(Error::Config(format!("{} has no block structure", self.label)));
        }
        if scalars.len() != self.blocks.len() {
            return Err(Error::Config(format!(
                "{} has {} blocks, got {} scalars",
                self.label,
                self.blocks.len(),
                scalars.len()
            )));
        }
        if scalars.iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
            return Err(Error::Config("block scalars must be positive".into()));
        }
        let n = self.n();
        let mut m = DenseMatrix::zeros(n, n);
        for (blk, c) in self.blocks.iter().zip(scalars) {
            for v in &blk.vectors {
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] += c * v[i] * v[j];
                    }
                }
            }
        }
        Ok(m)
    }

    /// Vectors of `m` fixed by `ad(h)` (basis in `m` coordinates).
    pub fn fixed_vectors(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for z in self.split.h_basis() {
            let zm = DenseMatrix::from_fn(n, n, |r, c| {
                self.split.project_m(&self.g.bracket(z, &self.split.m_basis()[c]))[r]
            });
            for r in 0..n {
                rows.push(zm.row(r).to_vec());
            }
        }
        if rows.is_empty() {
            return (0..n).map(|i| unit(n, i)).collect();
        }
        let ns = nullspace(&DenseMatrix::from_rows(&rows), 1e-10);
        (0..ns.cols()).map(|c| ns.col(c)).collect()
    }

    /// Rank of `h` via generic elements of `h`.
    pub fn h_rank(&self, seed: u64) -> usize {
        subalgebra_rank(&self.g, &self.h, seed)
    }
}

/// Rank of a subalgebra: centralizer dimension (inside the subalgebra) of a
/// generic element, minimized over three draws.
pub fn subalgebra_rank(g: &LieAlgebra, h: &Subalgebra, seed: u64) -> usize {
    use rand::{Rng, SeedableRng};
    let r = h.dim();
    if r == 0 {
        return 0;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..3)
        .map(|_| {
            let mut x = vec![0.0; g.dim()];
            for q in h.basis() {
                x = axpy(rng.random_range(-10..=10) as f64, q, &x);
            }
            // ad x restricted to h, in h coordinates
            let m = DenseMatrix::from_fn(r, r, |i, j| g.inner(&h.basis()[i], &g.bracket(&x, &h.basis()[j])));
            nullspace(&m, 1e-9).cols()
        })
        .min()
        .unwrap_or(0)
}

/// Ad(H)-invariant inner product on `m`.
#[derive(Clone, Debug)]
pub struct RiemannianHomMetric {
    pub space: Arc<CosetSpace>,
    pub inner: DenseMatrix<f64>,
}

impl RiemannianHomMetric {
    pub fn new(space: Arc<CosetSpace>, inner: DenseMatrix<f64>) -> Result<Self> {
        check_inner(&space, &inner)?;
        Ok(RiemannianHomMetric { space, inner })
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }
}

fn check_inner(space: &CosetSpace, inner: &DenseMatrix<f64>) -> Result<()> {
    let n = space.n();
    if inner.rows() != n || inner.cols() != n {
        return Err(Error::Dimension(format!(
            "inner product must be {n}x{n}, got {}x{}",
            inner.rows(),
            inner.cols()
        )));
    }
    if inner.sub(&inner.transpose()).max_magnitude() > 1e-12 || !is_spd(inner) {
        return Err(Error::Domain("inner product on m is not symmetric positive definite".into()));
    }
    let rep = ad_invariance_check(&space.g, &space.split, inner);
    if !rep.pass {
        return Err(Error::Invariance(format!(
            "inner product is not Ad(H)-invariant (defect {:e} at {:?})",
            rep.worst, rep.triple
        )));
    }
    Ok(())
}

/// Invariant (α,β)-metric: α = `inner`, β = `<·, v>_α`, and φ.
#[derive(Clone, Debug)]
pub struct InvariantABMetric {
    pub space: Arc<CosetSpace>,
    pub inner: DenseMatrix<f64>,
    pub v: Vec<f64>,
    pub phi: PhiFunction,
}

impl InvariantABMetric {
    pub fn new(space: Arc<CosetSpace>, inner: DenseMatrix<f64>, v: Vec<f64>, phi: PhiFunction) -> Result<Self> {
        check_inner(&space, &inner)?;
        if v.len() != space.n() {
            return Err(Error::Dimension(format!(
                "v has {} coordinates, m has dimension {}",
                v.len(),
                space.n()
            )));
        }
        if v.iter().all(|x| *x == 0.0) {
            return Err(Error::Domain("v = 0 means β = 0; use the Riemannian family instead".into()));
        }
        let hv = h_defect(&space, &v);
        if hv > 1e-12 {
            return Err(Error::Invariance(format!("v is not fixed by ad(h) (defect {hv:e})")));
        }
        let b = inner.bilinear(&v, &v).sqrt();
        let pos = positivity_check(&phi, b, POSITIVITY_GRID);
        if let Some(w) = pos.witness {
            return Err(Error::Positivity {
                s: w.s,
                value: w.value,
            });
        }
        Ok(InvariantABMetric { space, inner, v, phi })
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    /// α-length of `v`.
    pub fn b(&self) -> f64 {
        self.inner.bilinear(&self.v, &self.v).sqrt()
    }

    pub fn norm_data(&self) -> ABNormData {
        ABNormData {
            a: self.inner.clone(),
            v: self.v.clone(),
            phi: self.phi.clone(),
        }
    }

    /// Same metric with `v` rescaled to α-length 1.
    pub fn normalized(&self) -> InvariantABMetric {
        let b = self.b();
        InvariantABMetric {
            space: self.space.clone(),
            inner: self.inner.clone(),
            v: self.v.iter().map(|x| x / b).collect(),
            phi: self.phi.rescaled(b),
        }
    }

    pub fn is_riemannian(&self) -> bool {
        is_riemannian_phi(&self.phi, self.b(), self.n())
    }

    pub fn riemannian(&self) -> RiemannianHomMetric {
        RiemannianHomMetric {
            space: self.space.clone(),
            inner: self.inner.clone(),
        }
    }
}

fn h_defect(space: &CosetSpace, v: &[f64]) -> f64 {
    let x = space.split.embed(v);
    space
        .split
        .h_basis()
        .iter()
        .map(|z| space.g.bracket(z, &x).iter().fold(0.0f64, |m, c| m.max(c.abs())))
        .fold(0.0, f64::max)
}

/// Closed-form S-curvature at the origin.
///
/// The data are first normalized to `b = 1`, then
/// `S = -(1/α) Φ/(2Δ²) (-b <[v,y]_m, y> - α Q <[v,y]_m, v>)`.
pub fn s_curvature_hom(metric: &InvariantABMetric, y: &[f64]) -> Result<f64> {
    if y.iter().all(|x| *x == 0.0) {
        return Err(Error::Domain("S-curvature needs y != 0".into()));
    }
    let m = metric.normalized();
    let a = &m.inner;
    let alpha = a.bilinear(y, y).sqrt();
    let s = a.bilinear(y, &m.v) / alpha;
    let b = 1.0;
    let r = q_delta_phi(&m.phi, s, b, m.n())?;
    let w = m.space.bracket_m(&m.v, y);
    let p1 = a.bilinear(&w, y);
    let p2 = a.bilinear(&w, &m.v);
    let val = -(1.0 / alpha) * r.big_phi / (2.0 * r.delta * r.delta) * (-b * p1 - alpha * r.q * p2);
    Ok(S_HOM_CALIBRATION * val)
}

/// Result of the KVCL test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KvclReport {
    pub pass: bool,
    /// Largest entry of the symmetrized form `y ↦ <[v,y]_m, y>`.
    pub quadratic_defect: f64,
    /// Largest entry of the functional `y ↦ <[v,y]_m, v>`.
    pub linear_defect: f64,
    /// Worst direction, scaled to max-norm 1, and the violated value.
    pub witness: Option<Vec<f64>>,
    pub witness_value: Option<f64>,
}

/// Linear-algebraic test of `<[v,y]_m, y> = <[v,y]_m, v> = 0` for all `y`.
pub fn kvcl_check(metric: &InvariantABMetric) -> KvclReport {
    kvcl_check_data(&metric.space, &metric.inner, &metric.v)
}

pub fn kvcl_check_data(space: &CosetSpace, inner: &DenseMatrix<f64>, v: &[f64]) -> KvclReport {
    let n = space.n();
    let adv = space.ad_m(v);
    // <[v, e_i]_m, e_j> = (inner * adv)_{j i}
    let s = inner.matmul(&adv);
    let quad = s.symmetrize();
    let av = inner.matvec(v);
    let lin: Vec<f64> = (0..n).map(|i| (0..n).map(|k| adv[(k, i)] * av[k]).sum()).collect();
    let qd = quad.max_magnitude();
    let ld = lin.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let pass = qd <= KVCL_TOL && ld <= KVCL_TOL;
    let (witness, witness_value) = if pass {
        (None, None)
    } else if qd > KVCL_TOL {
        let (vals, vecs) = sym_eigen(&quad);
        let mut best = 0;
        for k in 0..n {
            let (bv, kv) = (vals[best], vals[k]);
            if kv.abs() > bv.abs() + 1e-12 || ((kv.abs() - bv.abs()).abs() <= 1e-12 && kv > bv) {
                best = k;
            }
        }
        let y = scale_max_one(&vecs.col(best));
        let val = quad.bilinear(&y, &y);
        (Some(y), Some(val))
    } else {
        let y = scale_max_one(&lin);
        let val = y.iter().zip(&lin).map(|(a, b)| a * b).sum();
        (Some(y), Some(val))
    };
    KvclReport {
        pass,
        quadratic_defect: qd,
        linear_defect: ld,
        witness,
        witness_value,
    }
}

fn scale_max_one(y: &[f64]) -> Vec<f64> {
    let m = y.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
    y.iter().map(|x| x / m).collect()
}

/// Both sides of the vanishing-S-curvature equivalence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingSReport {
    pub max_abs_s: f64,
    pub samples: usize,
    pub s_vanishes: bool,
    pub kvcl_pass: bool,
    pub agree: bool,
}

/// Evaluates `max |S|` over random rays and the KVCL test.
pub fn vanishing_s_equivalence(metric: &InvariantABMetric, samples: usize, seed: u64) -> Result<VanishingSReport> {
    if metric.is_riemannian() {
        return Err(Error::Precondition(
            "the equivalence is stated for non-Riemannian metrics".into(),
        ));
    }
    let n = metric.n();
    let pts = SpherePointSet::new(&[n], seed);
    let vals = map_indexed(samples, true, |i| s_curvature_hom(metric, &pts.point(i)[0]));
    let mut max_abs_s: f64 = 0.0;
    for v in vals {
        max_abs_s = max_abs_s.max(v?.abs());
    }
    let kvcl_pass = kvcl_check(metric).pass;
    let s_vanishes = max_abs_s < 1e-8;
    Ok(VanishingSReport {
        max_abs_s,
        samples,
        s_vanishes,
        kvcl_pass,
        agree: s_vanishes == kvcl_pass,
    })
}

/// `k = h + Rv`, `p = v^⊥` and the checks attached to them.
#[derive(Clone, Debug)]
pub struct KSubalgebraReport {
    pub k: Subalgebra,
    /// α-orthonormal basis of `p` in `m` coordinates.
    pub p: Vec<Vec<f64>>,
    pub closure_defect: f64,
    /// Largest `v`-component of `[z, x]_m` for `z` in `k`, `x` in `p`.
    pub p_invariance_defect: f64,
    /// Largest `ad(k)`-invariance defect of α restricted to `p`.
    pub inner_invariance_defect: f64,
}

pub fn k_subalgebra(metric: &InvariantABMetric) -> Result<KSubalgebraReport> {
    if !kvcl_check(metric).pass {
        return Err(Error::Precondition("k_subalgebra requires the KVCL conditions".into()));
    }
    let sp = &metric.space;
    let n = sp.n();
    let vg = sp.split.embed(&metric.v);
    let mut span: Vec<Vec<f64>> = sp.h.basis().to_vec();
    span.push(vg.clone());
    let k = Subalgebra::new(&sp.g, &span).map_err(|e| match e {
        Error::Structural(s) => Error::Structural(format!("h + Rv is not a subalgebra: {s}")),
        other => other,
    })?;
    let closure_defect = k.closure_defect(&sp.g);
    let a = &metric.inner;
    let av = a.matvec(&metric.v);
    let rows = vec![av.clone()];
    let ns = nullspace(&DenseMatrix::from_rows(&rows), 1e-12);
    let p = orthonormalize(&(0..ns.cols()).map(|c| ns.col(c)).collect::<Vec<_>>(), a, 1e-12);
    let b = metric.b();
    let mut p_def: f64 = 0.0;
    let mut inner_def: f64 = 0.0;
    for z in k.basis() {
        let zm: Vec<Vec<f64>> = p
            .iter()
            .map(|x| sp.split.project_m(&sp.g.bracket(z, &sp.split.embed(x))))
            .collect();
        for (i, img) in zm.iter().enumerate() {
            let comp: f64 = img.iter().zip(&av).map(|(x, y)| x * y).sum::<f64>() / b;
            p_def = p_def.max(comp.abs());
            for (j, other) in p.iter().enumerate() {
                let t = a.bilinear(img, other) + a.bilinear(&p[i], &zm[j]);
                inner_def = inner_def.max(t.abs());
            }
        }
    }
    let _ = n;
    Ok(KSubalgebraReport {
        k,
        p,
        closure_defect,
        p_invariance_defect: p_def,
        inner_invariance_defect: inner_def,
    })
}

/// `min_t F(w + t v)`.
pub fn submersion_norm(metric: &InvariantABMetric, w: &[f64]) -> Result<f64> {
    if w.iter().all(|x| *x == 0.0) {
        return Err(Error::Domain("submersion norm needs w != 0".into()));
    }
    let data = metric.norm_data();
    let f = |t: f64| -> f64 {
        let y = axpy(t, &metric.v, w);
        data.eval(&y)
    };
    let scale = metric.inner.bilinear(w, w).sqrt() / metric.b();
    // bracket the minimum of a convex function
    let mut lo = -scale;
    let mut hi = scale;
    let mut grow = 0;
    while f(lo) < f(lo + 1e-3 * scale) || f(hi) < f(hi - 1e-3 * scale) {
        lo *= 2.0;
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::Numeric("line search failed to bracket the fiber minimum".into()));
        }
    }
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * scale.max(1e-300) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    let v = f(0.5 * (a + b));
    if !v.is_finite() {
        return Err(Error::Numeric("fiber minimum is not finite".into()));
    }
    Ok(v)
}

/// Constancy of `F'(w) / α(w)` over random `w` in `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmersionRatio {
    pub mean: f64,
    pub variance: f64,
    pub samples: usize,
}

pub fn submersion_ratio(metric: &InvariantABMetric, samples: usize, seed: u64) -> Result<SubmersionRatio> {
    let ks = k_subalgebra(metric)?;
    let q = ks.p.len();
    if q == 0 {
        return Err(Error::Dimension("p is trivial".into()));
    }
    let pts = SpherePointSet::new(&[q], seed);
    let ratios = map_indexed(samples, true, |i| -> Result<f64> {
        let c = &pts.point(i)[0];
        let mut w = vec![0.0; metric.n()];
        for (ci, pi) in c.iter().zip(&ks.p) {
            w = axpy(*ci, pi, &w);
        }
        let alpha = metric.inner.bilinear(&w, &w).sqrt();
        Ok(submersion_norm(metric, &w)? / alpha)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let variance = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / ratios.len() as f64;
    Ok(SubmersionRatio {
        mean,
        variance,
        samples,
    })
}

/// Localization: the fundamental tensor of `F` at `v`, as a Riemannian metric.
pub fn localize_gv(metric: &InvariantABMetric) -> Result<RiemannianHomMetric> {
    if !kvcl_check(metric).pass {
        return Err(Error::Precondition(
            "localization needs v to satisfy the KVCL conditions".into(),
        ));
    }
    let t = metric.norm_data().hessian(&metric.v)?;
    let g = t.g.symmetrize();
    RiemannianHomMetric::new(metric.space.clone(), g)
}

/// `F_t = α + t <·, v>_α`.
pub fn randers_perturb(alpha: &RiemannianHomMetric, v: &[f64], t: f64) -> Result<InvariantABMetric> {
    let b = alpha.inner.bilinear(v, v).sqrt();
    if !(t >= 0.0) || t * b >= 1.0 {
        return Err(Error::Positivity {
            s: -b,
            value: 1.0 - t * b,
        });
    }
    let rep = kvcl_check_data(&alpha.space, &alpha.inner, v);
    if !rep.pass {
        return Err(Error::Precondition(format!(
            "v fails the KVCL conditions (defects {:e}, {:e})",
            rep.quadratic_defect, rep.linear_defect
        )));
    }
    InvariantABMetric::new(alpha.space.clone(), alpha.inner.clone(), v.to_vec(), PhiFunction::randers(t))
}

/// Structural checks for one coset space and fiber direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuralReport {
    pub rank_g: usize,
    pub rank_h: usize,
    pub rank_ok: bool,
    pub h_ideal_dim: usize,
    pub k_closed: bool,
    pub k_ideal_dim: Option<usize>,
    pub ideal_ok: bool,
    pub invariance: InvarianceReport,
    pub pass: bool,
    pub failure: Option<String>,
}

/// Rank inequality, ideals in `h` and `k = h + Rv`, and `ad(h)`-invariance.
pub fn structural_checks(space: &CosetSpace, inner: &DenseMatrix<f64>, v: &[f64], seed: u64) -> StructuralReport {
    let rank_g = rank(&space.g, seed);
    let rank_h = space.h_rank(seed);
    let rank_ok = rank_g <= rank_h + 1;
    let h_ideal_dim = maximal_ideal_in(&space.g, &space.h).len();
    let mut span: Vec<Vec<f64>> = space.h.basis().to_vec();
    span.push(space.split.embed(v));
    let k = Subalgebra::new(&space.g, &span);
    let k_closed = k.is_ok();
    let k_ideal_dim = k.ok().map(|k| maximal_ideal_in(&space.g, &k).len());
    let ideal_ok = h_ideal_dim == 0 && k_ideal_dim.is_some_and(|d| d <= 1);
    let invariance = ad_invariance_check(&space.g, &space.split, inner);
    let failure = if !rank_ok {
        Some(format!("rank inequality fails: rk g = {rank_g} > rk h + 1 = {}", rank_h + 1))
    } else if h_ideal_dim > 0 {
        Some(format!("h contains an ideal of g of dimension {h_ideal_dim}"))
    } else if !k_closed {
        Some("h + Rv is not closed under the bracket".into())
    } else if !ideal_ok {
        Some(format!(
            "k = h + Rv contains an ideal of dimension {}",
            k_ideal_dim.unwrap_or(0)
        ))
    } else if !invariance.pass {
        Some(format!("inner product not Ad(H)-invariant (defect {:e})", invariance.worst))
    } else {
        None
    };
    StructuralReport {
        rank_g,
        rank_h,
        rank_ok,
        h_ideal_dim,
        k_closed,
        k_ideal_dim,
        ideal_ok,
        invariance,
        pass: failure.is_none(),
        failure,
    }
}
