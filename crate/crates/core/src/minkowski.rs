//! (α,β)-norms `F(y) = α(y) φ(β(y)/α(y))` on a single vector space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::jet::{layout, Jet};
use crate::numkernel::linalg::{is_spd, DenseMatrix};
use crate::numkernel::scalar::Scalar;

/// Grid size used by [`positivity_check`] unless the caller asks otherwise.
pub const POSITIVITY_GRID: usize = 1001;

/// Sign in front of `s^2` in `Δ = 1 + sQ + (b^2 ± s^2) Q'`. The minus sign is
/// the one that makes the homogeneous S-curvature formula agree with the
/// definitional chart computation for non-Randers φ.
pub const DELTA_S2_SIGN: f64 = -1.0;

/// The φ families supported by configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PhiFamily {
    Riemannian,
    /// `1 + eps s`.
    Randers { eps: f64 },
    /// `sqrt(1 + s^2)`.
    SqrtQuadratic,
    /// `sum_k coeffs[k] s^k`.
    Polynomial { coeffs: Vec<f64> },
}

/// `s ↦ family(arg_scale * s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiFunction {
    pub family: PhiFamily,
    pub arg_scale: f64,
}

impl PhiFunction {
    pub fn new(family: PhiFamily) -> Self {
        PhiFunction {
            family,
            arg_scale: 1.0,
        }
    }

    pub fn riemannian() -> Self {
        Self::new(PhiFamily::Riemannian)
    }

    pub fn randers(eps: f64) -> Self {
        Self::new(PhiFamily::Randers { eps })
    }

    pub fn sqrt_quadratic() -> Self {
        Self::new(PhiFamily::SqrtQuadratic)
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self::new(PhiFamily::Polynomial { coeffs })
    }

    /// Same function of `s`, rewritten in the variable `s / k`.
    pub fn rescaled(&self, k: f64) -> Self {
        PhiFunction {
            family: self.family.clone(),
            arg_scale: self.arg_scale * k,
        }
    }

    pub fn eval<S: Scalar>(&self, s: &S) -> S {
        let t = s.scale(self.arg_scale);
        match &self.family {
            PhiFamily::Riemannian => S::one(),
            PhiFamily::Randers { eps } => t.scale(*eps).add_f64(1.0),
            PhiFamily::SqrtQuadratic => t.square().add_f64(1.0).sqrt(),
            PhiFamily::Polynomial { coeffs } => {
                let mut acc = S::zero();
                for c in coeffs.iter().rev() {
                    acc = (acc * &t).add_f64(*c);
                }
                acc
            }
        }
    }

    /// `[φ, φ', φ'', φ''']` at `s`.
    pub fn derivatives(&self, s: f64) -> [f64; 4] {
        let l = layout(1, 3);
        let j = self.eval(&Jet::variable(l, s, 0));
        [
            j.partial(&[]),
            j.partial(&[0]),
            j.partial(&[0, 0]),
            j.partial(&[0, 0, 0]),
        ]
    }

    /// True for the constant family, independent of parameters.
    pub fn is_constant(&self) -> bool {
        match &self.family {
            PhiFamily::Riemannian => true,
            PhiFamily::Randers { eps } => *eps == 0.0 || self.arg_scale == 0.0,
            PhiFamily::Polynomial { coeffs } => coeffs.iter().skip(1).all(|c| *c == 0.0),
            PhiFamily::SqrtQuadratic => self.arg_scale == 0.0,
        }
    }
}

/// Inner product `a` (α), dual vector `v` (β = <·, v>_a) and φ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ABNormData {
    pub a: DenseMatrix<f64>,
    pub v: Vec<f64>,
    pub phi: PhiFunction,
}

/// `g_ij(y)` and its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalTensor {
    pub y: Vec<f64>,
    pub g: DenseMatrix<f64>,
    pub g_inv: DenseMatrix<f64>,
}

impl ABNormData {
    pub fn new(a: DenseMatrix<f64>, v: Vec<f64>, phi: PhiFunction) -> Result<Self> {
        if a.rows() != v.len() || !a.is_square() {
            return Err(Error::Dimension(format!(
                "inner product is {}x{}, v has {} entries",
                a.rows(),
                a.cols(),
                v.len()
            )));
        }
        if !is_spd(&a) {
            return Err(Error::Domain("α matrix is not positive definite".into()));
        }
        Ok(ABNormData { a, v, phi })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// α-length of `v`.
    pub fn b(&self) -> f64 {
        self.a.bilinear(&self.v, &self.v).sqrt()
    }

    /// Rescales `v` to α-length 1 and reparametrizes φ; `F` is unchanged.
    pub fn normalized(&self) -> Result<Self> {
        let b = self.b();
        if b == 0.0 {
            return Err(Error::Domain("cannot normalize v = 0".into()));
        }
        Ok(ABNormData {
            a: self.a.clone(),
            v: self.v.iter().map(|x| x / b).collect(),
            phi: self.phi.rescaled(b),
        })
    }

    /// `(α(y), β(y))`.
    pub fn alpha_beta<S: Scalar>(&self, y: &[S]) -> (S, S) {
        let n = y.len();
        let mut a2 = S::zero();
        let mut beta = S::zero();
        for i in 0..n {
            let mut ay = S::zero();
            for (j, yj) in y.iter().enumerate() {
                let c = self.a[(i, j)];
                if c != 0.0 {
                    ay = ay + yj.scale(c);
                }
            }
            a2.mul_add_assign(&ay, &y[i]);
            if self.v[i] != 0.0 {
                beta = beta + ay.scale(self.v[i]);
            }
        }
        (a2.sqrt(), beta)
    }

    /// `F(y)` without the `y = 0` check; usable with jet scalars.
    pub fn eval<S: Scalar>(&self, y: &[S]) -> S {
        let (alpha, beta) = self.alpha_beta(y);
        let s = beta / &alpha;
        alpha * self.phi.eval(&s)
    }

    pub fn ab_eval(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "vector has {} entries, norm lives in dimension {}",
                y.len(),
                self.dim()
            )));
        }
        if y.iter().all(|x| *x == 0.0) {
            return Err(Error::Domain("F is not smooth at y = 0".into()));
        }
        Ok(self.eval(y))
    }

    /// Fundamental tensor `g_ij(y) = ½ [F²]_{y^i y^j}`.
    pub fn hessian(&self, y: &[f64]) -> Result<FundamentalTensor> {
        self.ab_eval(y)?;
        let n = self.dim();
        let l = layout(n, 2);
        let yj: Vec<Jet<f64>> = y.iter().enumerate().map(|(i, &v)| Jet::variable(l, v, i)).collect();
        let f = self.eval(&yj);
        let f2 = f.clone() * &f;
        f2.check_finite()?;
        let g = DenseMatrix::from_fn(n, n, |i, j| 0.5 * f2.partial(&[i.min(j), i.max(j)]));
        if !is_spd(&g) {
            return Err(Error::Inadmissible { y: y.to_vec() });
        }
        let g_inv = g.inverse()?;
        Ok(FundamentalTensor {
            y: y.to_vec(),
            g,
            g_inv,
        })
    }

    /// `<u, w>_y = g_ij(y) u^i w^j`.
    pub fn inner_y(&self, y: &[f64], u: &[f64], w: &[f64]) -> Result<f64> {
        Ok(self.hessian(y)?.g.bilinear(u, w))
    }
}

/// Which of the two positivity conditions failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PositivityCondition {
    PhiPositive,
    Criterion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityWitness {
    pub s: f64,
    pub value: f64,
    pub condition: PositivityCondition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub pass: bool,
    /// Worst violation, if any.
    pub witness: Option<PositivityWitness>,
    /// Smallest value of φ and of the criterion on the grid.
    pub min_phi: f64,
    pub min_criterion: f64,
}

/// `φ(s) - s φ'(s) + (b² - s²) φ''(s)` at `s`.
pub fn positivity_criterion(phi: &PhiFunction, s: f64, b: f64) -> f64 {
    let [p, d1, d2, _] = phi.derivatives(s);
    p - s * d1 + (b * b - s * s) * d2
}

/// Checks `φ > 0` and the strong-convexity criterion on `gridsize` uniform
/// points of `[-b, b]` (endpoints included).
pub fn positivity_check(phi: &PhiFunction, b: f64, gridsize: usize) -> PositivityReport {
    let m = gridsize.max(2);
    let mut min_phi = f64::INFINITY;
    let mut min_crit = f64::INFINITY;
    let mut witness: Option<PositivityWitness> = None;
    for i in 0..m {
        let s = if i == m - 1 {
            b
        } else {
            -b + 2.0 * b * i as f64 / (m - 1) as f64
        };
        let [p, d1, d2, _] = phi.derivatives(s);
        let crit = p - s * d1 + (b * b - s * s) * d2;
        min_phi = min_phi.min(p);
        min_crit = min_crit.min(crit);
        for (val, cond) in [
            (p, PositivityCondition::PhiPositive),
            (crit, PositivityCondition::Criterion),
        ] {
            if val <= 0.0 && witness.as_ref().is_none_or(|w| val <= w.value) {
                witness = Some(PositivityWitness {
                    s,
                    value: val,
                    condition: cond,
                });
            }
        }
    }
    PositivityReport {
        pass: witness.is_none(),
        witness,
        min_phi,
        min_criterion: min_crit,
    }
}

/// `(Q, Q', Q'', Δ, Φ)` at `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QDeltaPhi {
    pub q: f64,
    pub dq: f64,
    pub ddq: f64,
    pub delta: f64,
    pub big_phi: f64,
}

/// Evaluates `Q = φ'/(φ - sφ')`, its derivatives, `Δ` and `Φ` for manifold
/// dimension `n`.
pub fn q_delta_phi(phi: &PhiFunction, s: f64, b: f64, n: usize) -> Result<QDeltaPhi> {
    q_delta_phi_with(phi, s, b, n, DELTA_S2_SIGN)
}

/// As [`q_delta_phi`] with an explicit sign for the `s²` term of `Δ`.
pub fn q_delta_phi_with(phi: &PhiFunction, s: f64, b: f64, n: usize, s2_sign: f64) -> Result<QDeltaPhi> {
    let l3 = layout(1, 3);
    let sj = Jet::variable(l3, s, 0);
    let p = phi.eval(&sj);
    let dp = p.derivative(0);
    let s2 = sj.truncate(2);
    let den = p.truncate(2) - &(s2.clone() * &dp);
    if den.value().abs() < 1e-14 {
        return Err(Error::Singularity { s });
    }
    let qj = dp / &den;
    let q = qj.partial(&[]);
    let dq = qj.partial(&[0]);
    let ddq = qj.partial(&[0, 0]);
    let nf = n as f64;
    let delta = 1.0 + s * q + (b * b + s2_sign * s * s) * dq;
    let big_phi = -(q - s * dq) * (nf * delta + 1.0 + s * q) - (b * b - s * s) * (1.0 + s * q) * ddq;
    Ok(QDeltaPhi {
        q,
        dq,
        ddq,
        delta,
        big_phi,
    })
}

/// True iff `Φ` vanishes (below 1e-10) on a dense grid of `(-b, b)`.
pub fn is_riemannian_phi(phi: &PhiFunction, b: f64, n: usize) -> bool {
    let m = 1001;
    (1..m).all(|i| {
        let s = -b + 2.0 * b * i as f64 / m as f64;
        match q_delta_phi(phi, s, b, n) {
            Ok(v) => v.big_phi.abs() < 1e-10,
            Err(_) => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eye(n: usize) -> DenseMatrix<f64> {
        DenseMatrix::identity(n)
    }

    #[test]
    fn evaluation_examples() {
        let d = ABNormData::new(eye(2), vec![0.0, 0.0], PhiFunction::riemannian()).unwrap();
        assert!((d.ab_eval(&[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-15);
        let d = ABNormData::new(eye(2), vec![1.0, 0.0], PhiFunction::randers(0.5)).unwrap();
        assert!((d.ab_eval(&[1.0, 0.0]).unwrap() - 1.5).abs() < 1e-15);
        let d = ABNormData::new(eye(2), vec![1.0, 0.0], PhiFunction::sqrt_quadratic()).unwrap();
        assert!((d.ab_eval(&[1.0, 1.0]).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!(matches!(d.ab_eval(&[0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn riemannian_hessian_is_a() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]);
        let d = ABNormData::new(a.clone(), vec![0.0, 0.0], PhiFunction::riemannian()).unwrap();
        let g = d.hessian(&[0.3, -1.2]).unwrap().g;
        assert!(g.sub(&a).max_magnitude() < 1e-13);
    }

    #[test]
    fn positivity_examples() {
        let r = positivity_check(&PhiFunction::randers(0.5), 0.9, POSITIVITY_GRID);
        assert!(r.pass);
        assert!((r.min_phi - 0.55).abs() < 1e-12);
        assert!((r.min_criterion - 1.0).abs() < 1e-12);

        let r = positivity_check(&PhiFunction::polynomial(vec![1.0, 2.0]), 0.9, POSITIVITY_GRID);
        let w = r.witness.unwrap();
        assert!((w.s + 0.9).abs() < 1e-12 && (w.value + 0.8).abs() < 1e-12);
        assert_eq!(w.condition, PositivityCondition::PhiPositive);

        let r = positivity_check(&PhiFunction::polynomial(vec![1.0, 0.0, 2.0]), 0.9, POSITIVITY_GRID);
        let w = r.witness.unwrap();
        assert!((w.s.abs() - 0.9).abs() < 1e-12 && (w.value + 0.62).abs() < 1e-12);
        assert_eq!(w.condition, PositivityCondition::Criterion);
    }

    #[test]
    fn q_delta_phi_closed_forms() {
        let eps = 0.3;
        let (s, b, n) = (0.4, 0.8, 3);
        let r = q_delta_phi(&PhiFunction::randers(eps), s, b, n).unwrap();
        assert!((r.q - eps).abs() < 1e-14 && r.dq.abs() < 1e-14 && r.ddq.abs() < 1e-14);
        assert!((r.delta - (1.0 + s * eps)).abs() < 1e-14);
        assert!((r.big_phi + eps * (n as f64 + 1.0) * (1.0 + s * eps)).abs() < 1e-13);

        let r = q_delta_phi(&PhiFunction::riemannian(), s, b, n).unwrap();
        assert_eq!((r.q, r.big_phi), (0.0, 0.0));

        let r = q_delta_phi(&PhiFunction::sqrt_quadratic(), s, b, n).unwrap();
        assert!((r.q - s).abs() < 1e-14 && (r.dq - 1.0).abs() < 1e-14 && r.ddq.abs() < 1e-13);
        assert!(r.big_phi.abs() < 1e-13);
    }

    #[test]
    fn riemannian_detection() {
        assert!(is_riemannian_phi(&PhiFunction::riemannian(), 1.0, 3));
        assert!(is_riemannian_phi(&PhiFunction::sqrt_quadratic(), 1.0, 3));
        assert!(!is_riemannian_phi(&PhiFunction::randers(0.1), 1.0, 3));
    }

    #[test]
    fn singular_denominator() {
        // φ = 1 + s²: φ - sφ' = 1 - s² vanishes at s = 1
        let e = q_delta_phi(&PhiFunction::polynomial(vec![1.0, 0.0, 1.0]), 1.0, 1.0, 3).unwrap_err();
        assert_eq!(e, Error::Singularity { s: 1.0 });
    }

    #[test]
    fn normalization_preserves_f() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]);
        let d = ABNormData::new(a, vec![0.2, 0.5], PhiFunction::polynomial(vec![1.0, 0.4, 0.1])).unwrap();
        let dn = d.normalized().unwrap();
        assert!((dn.b() - 1.0).abs() < 1e-14);
        for y in [[1.0, 0.0], [0.3, -2.0], [-1.0, 1.0]] {
            assert!((d.ab_eval(&y).unwrap() - dn.ab_eval(&y).unwrap()).abs() < 1e-12);
        }
    }
}
