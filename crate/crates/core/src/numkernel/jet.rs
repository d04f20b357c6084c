//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the normalized Taylor coefficients `c_alpha` of a function
//! around a point, `f(p + d) = sum_alpha c_alpha d^alpha`, for every monomial of
//! total degree at most the layout order (at most 3). Products are truncated
//! convolutions, so the arithmetic is a ring homomorphism from smooth functions
//! onto the truncated polynomial ring. Coefficients are themselves generic
//! [`Scalar`]s, which lets jets nest.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use super::scalar::Scalar;
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 3;

/// Monomial bookkeeping for one `(nvars, order)` pair. Shared and immutable.
#[derive(Debug)]
pub struct Layout {
    nvars: usize,
    order: usize,
    /// Monomials as sorted variable lists, graded then lexicographic. The
    /// monomials of degree `< r` form a prefix, so lower-order layouts are
    /// prefixes of higher ones.
    monomials: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    /// `(i, j, k)`: coefficient `k` of a product accumulates `a_i * b_j`.
    product: Vec<(u32, u32, u32)>,
    /// Per variable: `(src, dst, multiplicity)` for differentiation.
    deriv: Vec<Vec<(u32, u32, f64)>>,
    /// `alpha!` for each monomial.
    factorial: Vec<f64>,
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Layout {
        let mut monomials: Vec<Vec<usize>> = vec![vec![]];
        let mut prev: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..order {
            let mut next = Vec::new();
            for m in &prev {
                let start = m.last().copied().unwrap_or(0);
                for v in start..nvars {
                    let mut mm = m.clone();
                    mm.push(v);
                    next.push(mm);
                }
            }
            monomials.extend(next.iter().cloned());
            prev = next;
        }
        let index: HashMap<Vec<usize>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();

        let mut product = Vec::new();
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                if a.len() + b.len() > order {
                    continue;
                }
                let mut m = a.clone();
                m.extend_from_slice(b);
                m.sort_unstable();
                product.push((i as u32, j as u32, index[&m] as u32));
            }
        }

        let mut deriv = vec![Vec::new(); nvars];
        for (src, m) in monomials.iter().enumerate() {
            for (v, table) in deriv.iter_mut().enumerate() {
                let mult = m.iter().filter(|&&u| u == v).count();
                if mult == 0 {
                    continue;
                }
                let mut lower = m.clone();
                let pos = lower.iter().position(|&u| u == v).unwrap();
                lower.remove(pos);
                table.push((src as u32, index[&lower] as u32, mult as f64));
            }
        }

        let factorial = monomials
            .iter()
            .map(|m| {
                let mut f = 1.0;
                let mut run = 1.0;
                for (p, v) in m.iter().enumerate() {
                    if p > 0 && m[p - 1] == *v {
                        run += 1.0;
                    } else {
                        run = 1.0;
                    }
                    f *= run;
                }
                f
            })
            .collect();

        Layout {
            nvars,
            order,
            monomials,
            index,
            product,
            deriv,
            factorial,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomial(&self, i: usize) -> &[usize] {
        &self.monomials[i]
    }

    /// Index of a monomial given as a (not necessarily sorted) variable list.
    pub fn index_of(&self, vars: &[usize]) -> Option<usize> {
        let mut m = vars.to_vec();
        m.sort_unstable();
        self.index.get(&m).copied()
    }

    /// Number of monomials of degree strictly below `r`.
    fn prefix_len(&self, r: usize) -> usize {
        self.monomials.iter().take_while(|m| m.len() < r).count()
    }
}

/// Shared layout for `(nvars, order)`.
pub fn layout(nvars: usize, order: usize) -> &'static Layout {
    assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
    static REGISTRY: OnceLock<Mutex<HashMap<(usize, usize), &'static Layout>>> = OnceLock::new();
    let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = reg.lock().expect("layout registry poisoned");
    map.entry((nvars, order))
        .or_insert_with(|| Box::leak(Box::new(Layout::build(nvars, order))))
}

/// Truncated Taylor expansion with coefficients in `S`.
///
/// A jet without a layout is a bare constant; it combines with any layout.
#[derive(Clone, Debug)]
pub struct Jet<S: Scalar = f64> {
    layout: Option<&'static Layout>,
    c: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn constant(v: S) -> Self {
        Jet {
            layout: None,
            c: vec![v],
        }
    }

    pub fn constant_in(layout: &'static Layout, v: S) -> Self {
        let mut c = vec![S::zero(); layout.len()];
        c[0] = v;
        Jet {
            layout: Some(layout),
            c,
        }
    }

    /// Seeded variable: value `v`, unit first-order coefficient in `var`.
    pub fn variable(layout: &'static Layout, v: S, var: usize) -> Self {
        assert!(var < layout.nvars);
        let mut j = Self::constant_in(layout, v);
        if layout.order >= 1 {
            j.c[1 + var] = S::one();
        }
        j
    }

    pub fn from_coeffs(layout: &'static Layout, c: Vec<S>) -> Self {
        assert_eq!(c.len(), layout.len());
        Jet {
            layout: Some(layout),
            c,
        }
    }

    pub fn layout(&self) -> Option<&'static Layout> {
        self.layout
    }

    pub fn coeffs(&self) -> &[S] {
        &self.c
    }

    pub fn value_s(&self) -> &S {
        &self.c[0]
    }

    /// Normalized Taylor coefficient of a monomial (zero if absent).
    pub fn coeff(&self, vars: &[usize]) -> S {
        match self.layout {
            None => {
                if vars.is_empty() {
                    self.c[0].clone()
                } else {
                    S::zero()
                }
            }
            Some(l) => l
                .index_of(vars)
                .map(|i| self.c[i].clone())
                .unwrap_or_else(S::zero),
        }
    }

    /// Mixed partial derivative `d^|alpha| f / d z^alpha` at the expansion point.
    pub fn partial(&self, vars: &[usize]) -> S {
        match self.layout {
            None => self.coeff(vars),
            Some(l) => match l.index_of(vars) {
                Some(i) => self.c[i].scale(l.factorial[i]),
                None => S::zero(),
            },
        }
    }

    pub fn gradient(&self, nvars: usize) -> Vec<S> {
        (0..nvars).map(|v| self.partial(&[v])).collect()
    }

    /// Exact derivative with respect to `var`; the result has one order less.
    pub fn derivative(&self, var: usize) -> Self {
        let Some(l) = self.layout else {
            return Jet::constant(S::zero());
        };
        if l.order == 0 {
            return Jet::constant(S::zero());
        }
        let lower = layout(l.nvars, l.order - 1);
        let mut c = vec![S::zero(); lower.len()];
        for &(src, dst, mult) in &l.deriv[var] {
            c[dst as usize] = self.c[src as usize].scale(mult);
        }
        Jet {
            layout: Some(lower),
            c,
        }
    }

    /// Drop all terms above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let Some(l) = self.layout else {
            return self.clone();
        };
        if order >= l.order {
            return self.clone();
        }
        let lower = layout(l.nvars, order);
        Jet {
            layout: Some(lower),
            c: self.c[..lower.len()].to_vec(),
        }
    }

    /// Re-express in `target`, sending variable `i` to `var_map[i]`. Terms
    /// above the target order are dropped.
    pub fn embed(&self, target: &'static Layout, var_map: &[usize]) -> Self {
        let mut c = vec![S::zero(); target.len()];
        match self.layout {
            None => c[0] = self.c[0].clone(),
            Some(l) => {
                assert_eq!(var_map.len(), l.nvars);
                let n = l.prefix_len(target.order + 1);
                let mut buf = Vec::with_capacity(MAX_ORDER);
                for (i, m) in l.monomials[..n].iter().enumerate() {
                    buf.clear();
                    buf.extend(m.iter().map(|&v| var_map[v]));
                    let k = target
                        .index_of(&buf)
                        .expect("embedding maps outside target layout");
                    c[k] = self.c[i].clone();
                }
            }
        }
        Jet {
            layout: Some(target),
            c,
        }
    }

    pub fn scale_by(&self, k: &S) -> Self {
        Jet {
            layout: self.layout,
            c: self.c.iter().map(|x| x.clone() * k).collect(),
        }
    }

    /// Fails with the offending multi-index if any coefficient is non-finite.
    pub fn check_finite(&self) -> Result<()> {
        for (i, x) in self.c.iter().enumerate() {
            if !x.is_finite() {
                let multi_index = match self.layout {
                    Some(l) => l.monomials[i].clone(),
                    None => vec![],
                };
                return Err(Error::NonFinite { multi_index });
            }
        }
        Ok(())
    }

    fn common(&self, other: &Self) -> Option<&'static Layout> {
        match (self.layout, other.layout) {
            (Some(a), Some(b)) => {
                debug_assert!(
                    std::ptr::eq(a, b),
                    "jet layouts differ: ({},{}) vs ({},{})",
                    a.nvars,
                    a.order,
                    b.nvars,
                    b.order
                );
                Some(a)
            }
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        }
    }

    /// `f(a0 + h) = sum_k d[k] h^k` with `d[k] = f^(k)(a0) / k!`.
    fn compose(&self, d: [S; MAX_ORDER + 1]) -> Self {
        let Some(l) = self.layout else {
            return Jet::constant(d[0].clone());
        };
        let mut h = self.clone();
        h.c[0] = S::zero();
        // Horner: ((d3 h + d2) h + d1) h + d0
        let mut acc = Jet::constant_in(l, d[l.order].clone());
        for k in (0..l.order).rev() {
            acc = mul_jets(&acc, &h, l);
            acc.c[0] = acc.c[0].clone() + &d[k];
        }
        // h has no constant term, so the value is exactly d0 (avoids 0 * inf)
        acc.c[0] = d[0].clone();
        acc
    }
}

fn mul_jets<S: Scalar>(a: &Jet<S>, b: &Jet<S>, l: &'static Layout) -> Jet<S> {
    let mut c = vec![S::zero(); l.len()];
    for &(i, j, k) in &l.product {
        c[k as usize].mul_add_assign(&a.c[i as usize], &b.c[j as usize]);
    }
    Jet { layout: Some(l), c }
}

impl<S: Scalar> Add<&Jet<S>> for Jet<S> {
    type Output = Jet<S>;
    fn add(mut self, rhs: &Jet<S>) -> Jet<S> {
        match (self.layout, rhs.layout) {
            (_, None) => {
                self.c[0] = self.c[0].clone() + &rhs.c[0];
                self
            }
            (None, Some(_)) => {
                let mut out = rhs.clone();
                out.c[0] = out.c[0].clone() + &self.c[0];
                out
            }
            (Some(_), Some(_)) => {
                self.common(rhs);
                for (x, y) in self.c.iter_mut().zip(&rhs.c) {
                    *x = x.clone() + y;
                }
                self
            }
        }
    }
}

impl<S: Scalar> Sub<&Jet<S>> for Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: &Jet<S>) -> Jet<S> {
        self + &(-rhs.clone())
    }
}

impl<S: Scalar> Mul<&Jet<S>> for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: &Jet<S>) -> Jet<S> {
        match (self.layout, rhs.layout) {
            (_, None) => self.scale_by(&rhs.c[0]),
            (None, Some(_)) => rhs.scale_by(&self.c[0]),
            (Some(_), Some(_)) => {
                let l = self.common(rhs).unwrap();
                mul_jets(&self, rhs, l)
            }
        }
    }
}

impl<S: Scalar> Div<&Jet<S>> for Jet<S> {
    type Output = Jet<S>;
    fn div(self, rhs: &Jet<S>) -> Jet<S> {
        if rhs.layout.is_none() {
            let r = rhs.c[0].recip();
            return self.scale_by(&r);
        }
        self * &rhs.recip()
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: Jet<S>) -> Jet<S> {
                $tr::$m(self, &rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet {
            layout: self.layout,
            c: self.c.into_iter().map(|x| -x).collect(),
        }
    }
}

impl<S: Scalar> Scalar for Jet<S> {
    fn from_f64(v: f64) -> Self {
        Jet::constant(S::from_f64(v))
    }

    fn value(&self) -> f64 {
        self.c[0].value()
    }

    fn scale(&self, k: f64) -> Self {
        Jet {
            layout: self.layout,
            c: self.c.iter().map(|x| x.scale(k)).collect(),
        }
    }

    fn add_f64(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.c[0] = out.c[0].add_f64(k);
        out
    }

    fn recip(&self) -> Self {
        let r = self.c[0].recip();
        let r2 = r.clone() * &r;
        let r3 = r2.clone() * &r;
        let r4 = r3.clone() * &r;
        self.compose([r, -r2, r3, -r4])
    }

    fn sqrt(&self) -> Self {
        let s = self.c[0].sqrt();
        let r = self.c[0].recip();
        let d1 = (s.clone() * &r).scale(0.5);
        let d2 = (d1.clone() * &r).scale(-0.25);
        let d3 = (d2.clone() * &r).scale(-0.5);
        self.compose([s, d1, d2, d3])
    }

    fn exp(&self) -> Self {
        let e = self.c[0].exp();
        self.compose([e.clone(), e.clone(), e.scale(0.5), e.scale(1.0 / 6.0)])
    }

    fn ln(&self) -> Self {
        let r = self.c[0].recip();
        let r2 = r.clone() * &r;
        let r3 = r2.clone() * &r;
        self.compose([self.c[0].ln(), r, r2.scale(-0.5), r3.scale(1.0 / 3.0)])
    }

    fn sin(&self) -> Self {
        let s = self.c[0].sin();
        let c = self.c[0].cos();
        self.compose([s.clone(), c.clone(), s.scale(-0.5), c.scale(-1.0 / 6.0)])
    }

    fn cos(&self) -> Self {
        let s = self.c[0].sin();
        let c = self.c[0].cos();
        self.compose([c.clone(), -s.clone(), c.scale(-0.5), s.scale(1.0 / 6.0)])
    }

    fn magnitude(&self) -> f64 {
        self.c.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        match (a.layout, b.layout) {
            (Some(l), Some(_)) => {
                if self.layout.is_none() {
                    let v = self.c[0].clone();
                    *self = Jet::constant_in(l, v);
                }
                for &(i, j, k) in &l.product {
                    self.c[k as usize].mul_add_assign(&a.c[i as usize], &b.c[j as usize]);
                }
            }
            _ => {
                let p = a.clone() * b;
                *self = self.clone() + &p;
            }
        }
    }
}

/// Evaluates `f` at `point` with the variables listed in `seeds` promoted to
/// jet variables (in the order given); the remaining inputs stay constant.
pub fn jet_eval<F>(f: F, point: &[f64], seeds: &[usize], order: usize) -> Result<Jet<f64>>
where
    F: Fn(&[Jet<f64>]) -> Jet<f64>,
{
    if seeds.is_empty() {
        return Err(Error::Domain("jet evaluation needs at least one seed".into()));
    }
    let l = layout(seeds.len(), order);
    let args: Vec<Jet<f64>> = point
        .iter()
        .enumerate()
        .map(|(i, &p)| match seeds.iter().position(|&s| s == i) {
            Some(v) => Jet::variable(l, p, v),
            None => Jet::constant_in(l, p),
        })
        .collect();
    let out = f(&args);
    out.check_finite()?;
    Ok(out)
}
