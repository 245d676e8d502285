//! Numeric types the chart metrics are written against.
//!
//! Chart metrics are closed forms evaluated on `f64`, on [`Jet3`] (surface
//! germs) or on [`Grad2`] over `Jet3` (surface germs that also carry the
//! first derivatives with respect to the two horizontal ambient coordinates).

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::jet::Jet3;

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(x: f64) -> Self;
    fn value(&self) -> f64;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
}

impl Scalar for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
}

impl Scalar for Jet3 {
    fn cst(x: f64) -> Self {
        Jet3::cst(x)
    }
    fn value(&self) -> f64 {
        Jet3::value(self)
    }
    fn sinh(&self) -> Self {
        Jet3::sinh(self)
    }
    fn cosh(&self) -> Self {
        Jet3::cosh(self)
    }
}

/// First-order dual number in two extra directions `(a, b)` over a base
/// scalar: `val + da·ε_a + db·ε_b` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grad2<S> {
    pub val: S,
    pub da: S,
    pub db: S,
}

impl<S: Scalar> Grad2<S> {
    pub fn seed_a(val: S) -> Self {
        Grad2 { val, da: S::cst(1.0), db: S::cst(0.0) }
    }
    pub fn seed_b(val: S) -> Self {
        Grad2 { val, da: S::cst(0.0), db: S::cst(1.0) }
    }
}

impl<S: Scalar> Add for Grad2<S> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Grad2 { val: self.val + r.val, da: self.da + r.da, db: self.db + r.db }
    }
}

impl<S: Scalar> Sub for Grad2<S> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Grad2 { val: self.val - r.val, da: self.da - r.da, db: self.db - r.db }
    }
}

impl<S: Scalar> Mul for Grad2<S> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Grad2 {
            val: self.val * r.val,
            da: self.da * r.val + self.val * r.da,
            db: self.db * r.val + self.val * r.db,
        }
    }
}

impl<S: Scalar> Div for Grad2<S> {
    type Output = Self;
    fn div(self, r: Self) -> Self {
        let q = self.val / r.val;
        Grad2 {
            val: q,
            da: (self.da - q * r.da) / r.val,
            db: (self.db - q * r.db) / r.val,
        }
    }
}

impl<S: Scalar> Neg for Grad2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Grad2 { val: -self.val, da: -self.da, db: -self.db }
    }
}

impl<S: Scalar> Scalar for Grad2<S> {
    fn cst(x: f64) -> Self {
        Grad2 { val: S::cst(x), da: S::cst(0.0), db: S::cst(0.0) }
    }
    fn value(&self) -> f64 {
        self.val.value()
    }
    fn sinh(&self) -> Self {
        let c = self.val.cosh();
        Grad2 { val: self.val.sinh(), da: c * self.da, db: c * self.db }
    }
    fn cosh(&self) -> Self {
        let s = self.val.sinh();
        Grad2 { val: self.val.cosh(), da: s * self.da, db: s * self.db }
    }
}
