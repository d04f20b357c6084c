use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic shared by plain reals and truncated Taylor jets.
///
/// Every geometric routine in the crate is written against this trait so that
/// derivatives of composite quantities come from running the same code on jets.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    fn from_f64(v: f64) -> Self;

    /// Innermost real value (used for pivoting and diagnostics).
    fn value(&self) -> f64;

    fn scale(&self, k: f64) -> Self;
    fn add_f64(&self, k: f64) -> Self;

    fn recip(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;

    /// Largest absolute coefficient, used by series stopping rules.
    fn magnitude(&self) -> f64;

    fn is_finite(&self) -> bool;

    /// `self += a * b`, in place where the representation allows it.
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self = self.clone() + a.clone() * b;
    }

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn square(&self) -> Self {
        self.clone() * self
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn scale(&self, k: f64) -> Self {
        self * k
    }
    #[inline]
    fn add_f64(&self, k: f64) -> Self {
        self + k
    }
    #[inline]
    fn recip(&self) -> Self {
        1.0 / self
    }
    #[inline]
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    #[inline]
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    #[inline]
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    #[inline]
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    #[inline]
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    #[inline]
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    #[inline]
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}
