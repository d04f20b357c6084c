//! Sectional curvature of invariant Riemannian metrics at the origin,
//! computed from brackets alone.

use serde::{Deserialize, Serialize};

use super::{CosetSpace, RiemannianHomMetric};
use crate::error::{Error, Result};
use crate::numkernel::linalg::{axpy, nullspace, orthonormalize, sym_eigen, DenseMatrix};
use crate::numkernel::minimize::{minimize_on_spheres, MinimizerConfig};

/// `U(u1, u2)`, defined by `<U(u1,u2), u3> = ½(<[u3,u1]_m, u2> + <[u3,u2]_m, u1>)`.
pub fn u_tensor(metric: &RiemannianHomMetric, u1: &[f64], u2: &[f64]) -> Result<Vec<f64>> {
    let sp = &metric.space;
    let a = &metric.inner;
    let (a1, a2) = (a.matvec(u1), a.matvec(u2));
    let rhs: Vec<f64> = (0..sp.n())
        .map(|k| {
            let e = crate::liealg::unit(sp.n(), k);
            let b1 = sp.bracket_m(&e, u1);
            let b2 = sp.bracket_m(&e, u2);
            0.5 * (dotv(&b1, &a2) + dotv(&b2, &a1))
        })
        .collect();
    a.solve(&rhs)
}

fn dotv(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| p * q).sum()
}

fn area2(a: &DenseMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    a.bilinear(x, x) * a.bilinear(y, y) - a.bilinear(x, y).powi(2)
}

/// Sectional curvature of a commuting pair, `(|U(x,y)|² - <U(x,x),U(y,y)>) / area²`.
pub fn commuting_pair_sectional(metric: &RiemannianHomMetric, v1: &[f64], v2: &[f64]) -> Result<f64> {
    let sp = &metric.space;
    let br = sp.bracket_g(v1, v2);
    let scale = (dotv(v1, v1) * dotv(v2, v2)).sqrt().max(1e-300);
    let defect = br.iter().fold(0.0f64, |m, x| m.max(x.abs())) / scale;
    if defect > 1e-12 {
        return Err(Error::Precondition(format!(
            "the pair does not commute (|[v1, v2]| = {defect:e})"
        )));
    }
    let a = &metric.inner;
    let ar = area2(a, v1, v2);
    if ar <= 1e-14 * a.bilinear(v1, v1) * a.bilinear(v2, v2) {
        return Err(Error::DegenerateFlag);
    }
    let u12 = u_tensor(metric, v1, v2)?;
    let u11 = u_tensor(metric, v1, v1)?;
    let u22 = u_tensor(metric, v2, v2)?;
    Ok((a.bilinear(&u12, &u12) - a.bilinear(&u11, &u22)) / ar)
}

/// `<R(x,y)y, x>` for an invariant metric, general (not necessarily commuting) pair.
pub fn lie_curvature_numerator(metric: &RiemannianHomMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    let sp = &metric.space;
    let a = &metric.inner;
    let xy = sp.bracket_m(x, y);
    let xg = sp.split.embed(x);
    let yg = sp.split.embed(y);
    let xyg = sp.g.bracket(&xg, &yg);
    let t2 = sp.split.project_m(&sp.g.bracket(&xg, &xyg));
    let t3 = sp.split.project_m(&sp.g.bracket(&yg, &xyg.iter().map(|c| -c).collect::<Vec<_>>()));
    let uxy = u_tensor(metric, x, y)?;
    let uxx = u_tensor(metric, x, x)?;
    let uyy = u_tensor(metric, y, y)?;
    Ok(-0.75 * a.bilinear(&xy, &xy) - 0.5 * a.bilinear(&t2, y) - 0.5 * a.bilinear(&t3, x)
        + a.bilinear(&uxy, &uxy)
        - a.bilinear(&uxx, &uyy))
}

/// Sectional curvature of the plane spanned by `x` and `y`.
pub fn lie_sectional(metric: &RiemannianHomMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    let ar = area2(&metric.inner, x, y);
    if ar <= 1e-14 * metric.inner.bilinear(x, x) * metric.inner.bilinear(y, y) {
        return Err(Error::DegenerateFlag);
    }
    Ok(lie_curvature_numerator(metric, x, y)? / ar)
}

/// Symmetric matrix `J` with `<R(x,y)y, x> = yᵀ J y`.
pub fn lie_jacobi_form(metric: &RiemannianHomMetric, x: &[f64]) -> Result<DenseMatrix<f64>> {
    let sp: &CosetSpace = &metric.space;
    let n = sp.n();
    let a = &metric.inner;
    let xg = sp.split.embed(x);
    let adm = sp.ad_m(x);
    let mut j = adm.transpose().matmul(a).matmul(&adm).scale(-0.75);

    let incl = sp.split.inclusion_matrix();
    let adx = sp.g.ad_matrix(&xg);
    let c = sp.split.pr_m_matrix().matmul(&adx).matmul(&adx).matmul(&incl);
    j = j.add(&a.matmul(&c).symmetrize().scale(-0.5));

    // -½ <[y,[y,x]]_m, x>, polarized
    let ax = a.matvec(x);
    let cols: Vec<Vec<f64>> = (0..n).map(|i| incl.col(i)).collect();
    let yx: Vec<Vec<f64>> = cols.iter().map(|e| sp.g.bracket(e, &xg)).collect();
    let mut m3 = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let t = sp.split.project_m(&sp.g.bracket(&cols[i], &yx[k]));
            m3[(i, k)] = dotv(&t, &ax);
        }
    }
    j = j.add(&m3.symmetrize().scale(-0.5));

    let ucols: Vec<Vec<f64>> = (0..n)
        .map(|k| u_tensor(metric, x, &crate::liealg::unit(n, k)))
        .collect::<Result<_>>()?;
    let ux = DenseMatrix::from_fn(n, n, |r, c| ucols[c][r]);
    j = j.add(&ux.transpose().matmul(a).matmul(&ux));

    let w = u_tensor(metric, x, x)?;
    j = j.sub(&a.matmul(&sp.ad_m(&w)).symmetrize());
    Ok(j.symmetrize())
}

/// Minimum sectional curvature over planes containing `x`, with the minimizing edge.
pub fn pole_min_sectional(metric: &RiemannianHomMetric, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let a = &metric.inner;
    let n = metric.n();
    let j = lie_jacobi_form(metric, x)?;
    let ax = a.matvec(x);
    let ns = nullspace(&DenseMatrix::from_rows(&[ax]), 1e-12);
    let q = orthonormalize(&(0..ns.cols()).map(|c| ns.col(c)).collect::<Vec<_>>(), a, 1e-12);
    if q.len() + 1 != n {
        return Err(Error::Numeric("complement of the flagpole has wrong dimension".into()));
    }
    let xx = a.bilinear(x, x);
    let red = DenseMatrix::from_fn(q.len(), q.len(), |r, c| j.bilinear(&q[r], &q[c]) / xx);
    let (vals, vecs) = sym_eigen(&red);
    let mut w = vec![0.0; n];
    for (k, qk) in q.iter().enumerate() {
        w = axpy(vecs[(k, 0)], qk, &w);
    }
    Ok((vals[0], w))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionalMin {
    pub value: f64,
    pub pole: Vec<f64>,
    pub edge: Vec<f64>,
    /// Flagpoles evaluated (each one minimized exactly over its planes).
    pub poles: usize,
}

/// Minimum sectional curvature at the origin: a search over flagpoles, each
/// minimized exactly over the planes through it.
pub fn min_lie_sectional(metric: &RiemannianHomMetric, config: &MinimizerConfig) -> Result<SectionalMin> {
    let n = metric.n();
    if n < 2 {
        return Err(Error::Dimension("sectional curvature needs dim m >= 2".into()));
    }
    // a-orthonormal frame so sphere points are α-unit poles
    let frame = orthonormalize(
        &(0..n).map(|i| crate::liealg::unit(n, i)).collect::<Vec<_>>(),
        &metric.inner,
        1e-12,
    );
    let to_pole = |c: &[f64]| {
        let mut x = vec![0.0; n];
        for (ci, fi) in c.iter().zip(&frame) {
            x = axpy(*ci, fi, &x);
        }
        x
    };
    let res = minimize_on_spheres(
        |p| pole_min_sectional(metric, &to_pole(&p[0])).ok().map(|r| r.0),
        &[n],
        config,
    )?;
    let pole = to_pole(&res.point[0]);
    let (value, edge) = pole_min_sectional(metric, &pole)?;
    Ok(SectionalMin {
        value,
        pole,
        edge,
        poles: res.evaluations,
    })
}
