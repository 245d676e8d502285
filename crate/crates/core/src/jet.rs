//! Order-3 truncated Taylor arithmetic in two variables.
//!
//! A [`Jet3`] stores the Taylor coefficients `c_ij` of a function germ at a
//! point for every monomial `u^i v^j` with `i + j <= 3`. Coefficients are
//! kept in graded-lexicographic order:
//!
//! | slot | 0 | 1 | 2 | 3  | 4  | 5  | 6  | 7   | 8   | 9  |
//! |------|---|---|---|----|----|----|----|-----|-----|----|
//! | mono | 1 | u | v | u² | uv | v² | u³ | u²v | uv² | v³ |
//!
//! The partial derivative `∂^{i+j} / ∂u^i ∂v^j` at the expansion point is
//! `c_ij · i! · j!`.
//!
//! Differentiating a jet with [`Jet3::du`] or [`Jet3::dv`] lowers its valid
//! order by one; the top-degree slots of the result are zero and carry no
//! information. Callers track how many differentiations a value has seen.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

/// Number of stored coefficients.
pub const JET_LEN: usize = 10;

/// Truncation order.
pub const JET_ORDER: usize = 3;

/// `(i, j)` exponents of each slot.
pub const MONOMIALS: [(usize, usize); JET_LEN] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

/// Smallest constant term accepted as a divisor.
pub const DIV_EPS: f64 = 1e-300;

/// Slot index of `u^i v^j`, or `None` beyond the truncation order.
pub const fn slot(i: usize, j: usize) -> Option<usize> {
    let d = i + j;
    if d > JET_ORDER {
        return None;
    }
    // graded blocks start at 0, 1, 3, 6; within a block u-power descends
    Some(d * (d + 1) / 2 + j)
}

const fn build_product_table() -> [(u8, u8, u8); 35] {
    let mut out = [(0u8, 0u8, 0u8); 35];
    let mut n = 0;
    let mut a = 0;
    while a < JET_LEN {
        let mut b = 0;
        while b < JET_LEN {
            let (ia, ja) = MONOMIALS[a];
            let (ib, jb) = MONOMIALS[b];
            if let Some(t) = slot(ia + ib, ja + jb) {
                out[n] = (a as u8, b as u8, t as u8);
                n += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
}

/// Every `(a, b, target)` slot triple whose product survives truncation.
const PRODUCT_TABLE: [(u8, u8, u8); 35] = build_product_table();

const FACTORIAL: [f64; 4] = [1.0, 1.0, 2.0, 6.0];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("non-finite jet input {0}")]
    NonFinite(f64),
    #[error("division by a jet with constant term {0:e}")]
    DivisionByZero(f64),
    #[error("{func} is not defined at {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("derivative order ({i}, {j}) exceeds the truncation order {JET_ORDER}")]
    OrderOverflow { i: usize, j: usize },
}

/// Coordinate axis of the two seeded variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    U,
    V,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::U => 0,
            Axis::V => 1,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        if i == 0 {
            Axis::U
        } else {
            Axis::V
        }
    }
}

#[derive(Clone, Copy, PartialEq, Default)]
pub struct Jet3 {
    c: [f64; JET_LEN],
}

impl fmt::Debug for Jet3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Jet3").field(&self.c).finish()
    }
}

impl Jet3 {
    pub const ZERO: Jet3 = Jet3 { c: [0.0; JET_LEN] };

    /// Constant germ. Non-finite values are rejected.
    pub fn constant(value: f64) -> Result<Jet3, JetError> {
        if !value.is_finite() {
            return Err(JetError::NonFinite(value));
        }
        Ok(Jet3::cst(value))
    }

    /// Constant germ without the finiteness check.
    #[inline]
    pub fn cst(value: f64) -> Jet3 {
        let mut c = [0.0; JET_LEN];
        c[0] = value;
        Jet3 { c }
    }

    /// Coordinate variable seeded on `axis` at `value`.
    pub fn variable(axis: Axis, value: f64) -> Result<Jet3, JetError> {
        if !value.is_finite() {
            return Err(JetError::NonFinite(value));
        }
        Ok(Jet3::var(axis, value))
    }

    #[inline]
    pub fn var(axis: Axis, value: f64) -> Jet3 {
        let mut j = Jet3::cst(value);
        j.c[1 + axis.index()] = 1.0;
        j
    }

    pub fn from_coeffs(c: [f64; JET_LEN]) -> Jet3 {
        Jet3 { c }
    }

    pub fn coeffs(&self) -> &[f64; JET_LEN] {
        &self.c
    }

    /// Taylor coefficient of `u^i v^j`.
    pub fn coeff(&self, i: usize, j: usize) -> Result<f64, JetError> {
        slot(i, j)
            .map(|s| self.c[s])
            .ok_or(JetError::OrderOverflow { i, j })
    }

    /// `∂^{i+j} f / ∂u^i ∂v^j` at the expansion point.
    pub fn partial(&self, i: usize, j: usize) -> Result<f64, JetError> {
        Ok(self.coeff(i, j)? * FACTORIAL[i] * FACTORIAL[j])
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// First partials `(∂_u, ∂_v)`.
    #[inline]
    pub fn gradient(&self) -> [f64; 2] {
        [self.c[1], self.c[2]]
    }

    /// Jet of `∂f/∂u`, valid to one order less than `self`.
    pub fn du(&self) -> Jet3 {
        let c = &self.c;
        Jet3 {
            c: [
                c[1],
                2.0 * c[3],
                c[4],
                3.0 * c[6],
                2.0 * c[7],
                c[8],
                0.0,
                0.0,
                0.0,
                0.0,
            ],
        }
    }

    /// Jet of `∂f/∂v`, valid to one order less than `self`.
    pub fn dv(&self) -> Jet3 {
        let c = &self.c;
        Jet3 {
            c: [
                c[2],
                c[4],
                2.0 * c[5],
                c[7],
                2.0 * c[8],
                3.0 * c[9],
                0.0,
                0.0,
                0.0,
                0.0,
            ],
        }
    }

    #[inline]
    pub fn d(&self, axis: usize) -> Jet3 {
        if axis == 0 {
            self.du()
        } else {
            self.dv()
        }
    }

    /// Compose with a univariate function given its value and first three
    /// derivatives at the constant term.
    pub fn lift(&self, f: [f64; 4]) -> Jet3 {
        let mut d = *self;
        d.c[0] = 0.0;
        let d2 = d * d;
        let d3 = d2 * d;
        let mut out = d * f[1] + d2 * (f[2] / 2.0) + d3 * (f[3] / 6.0);
        out.c[0] = f[0];
        out
    }

    pub fn recip(&self) -> Result<Jet3, JetError> {
        let a = self.c[0];
        if !(a.abs() > DIV_EPS) {
            return Err(JetError::DivisionByZero(a));
        }
        let r = 1.0 / a;
        Ok(self.lift([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]))
    }

    pub fn checked_div(&self, rhs: &Jet3) -> Result<Jet3, JetError> {
        Ok(*self * rhs.recip()?)
    }

    pub fn exp(&self) -> Jet3 {
        let e = self.c[0].exp();
        self.lift([e; 4])
    }

    pub fn ln(&self) -> Result<Jet3, JetError> {
        let a = self.c[0];
        if !(a > 0.0) {
            return Err(JetError::Domain { func: "log", value: a });
        }
        let r = 1.0 / a;
        Ok(self.lift([a.ln(), r, -r * r, 2.0 * r * r * r]))
    }

    pub fn sqrt(&self) -> Result<Jet3, JetError> {
        let a = self.c[0];
        if !(a > 0.0) {
            return Err(JetError::Domain { func: "sqrt", value: a });
        }
        let s = a.sqrt();
        let f1 = 0.5 / s;
        let f2 = -0.5 * f1 / a;
        let f3 = -1.5 * f2 / a;
        Ok(self.lift([s, f1, f2, f3]))
    }

    pub fn sin(&self) -> Jet3 {
        let (s, c) = self.c[0].sin_cos();
        self.lift([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet3 {
        let (s, c) = self.c[0].sin_cos();
        self.lift([c, -s, -c, s])
    }

    pub fn sinh(&self) -> Jet3 {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.lift([s, c, s, c])
    }

    pub fn cosh(&self) -> Jet3 {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.lift([c, s, c, s])
    }

    pub fn tanh(&self) -> Jet3 {
        let t = self.c[0].tanh();
        let sech2 = 1.0 - t * t;
        self.lift([t, sech2, -2.0 * t * sech2, (6.0 * t * t - 2.0) * sech2])
    }

    pub fn atan(&self) -> Jet3 {
        let a = self.c[0];
        let q = 1.0 / (1.0 + a * a);
        self.lift([
            a.atan(),
            q,
            -2.0 * a * q * q,
            (6.0 * a * a - 2.0) * q * q * q,
        ])
    }

    /// `|f|`, defined away from zero only.
    pub fn abs(&self) -> Result<Jet3, JetError> {
        let a = self.c[0];
        if a == 0.0 || !a.is_finite() {
            return Err(JetError::Domain { func: "abs", value: a });
        }
        Ok(if a > 0.0 { *self } else { -*self })
    }

    /// Integer power. Negative exponents require a nonzero constant term.
    pub fn powi(&self, n: i32) -> Result<Jet3, JetError> {
        let base = if n < 0 { self.recip()? } else { *self };
        let mut acc = Jet3::cst(1.0);
        for _ in 0..n.unsigned_abs() {
            acc *= base;
        }
        Ok(acc)
    }

    /// `f^g` for a positive base, through `exp(g · ln f)`.
    pub fn powj(&self, exponent: &Jet3) -> Result<Jet3, JetError> {
        let a = self.c[0];
        if !(a > 0.0) {
            return Err(JetError::Domain { func: "pow", value: a });
        }
        Ok((*exponent * self.ln()?).exp())
    }

    /// Value after shifting the expansion point by `(du, dv)`.
    pub fn eval_offset(&self, du: f64, dv: f64) -> f64 {
        MONOMIALS
            .iter()
            .zip(self.c.iter())
            .map(|(&(i, j), c)| c * du.powi(i as i32) * dv.powi(j as i32))
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    #[inline]
    fn add(mut self, rhs: Jet3) -> Jet3 {
        for k in 0..JET_LEN {
            self.c[k] += rhs.c[k];
        }
        self
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    #[inline]
    fn sub(mut self, rhs: Jet3) -> Jet3 {
        for k in 0..JET_LEN {
            self.c[k] -= rhs.c[k];
        }
        self
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    #[inline]
    fn mul(self, rhs: Jet3) -> Jet3 {
        let mut c = [0.0; JET_LEN];
        for &(a, b, t) in PRODUCT_TABLE.iter() {
            c[t as usize] += self.c[a as usize] * rhs.c[b as usize];
        }
        Jet3 { c }
    }
}

/// Plain division. A zero divisor yields non-finite coefficients, as for
/// `f64`; use [`Jet3::checked_div`] where the divisor is not known to be safe.
impl Div for Jet3 {
    type Output = Jet3;
    #[inline]
    fn div(self, rhs: Jet3) -> Jet3 {
        let a = rhs.c[0];
        let r = 1.0 / a;
        self * rhs.lift([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    #[inline]
    fn neg(mut self) -> Jet3 {
        for x in self.c.iter_mut() {
            *x = -*x;
        }
        self
    }
}

impl Add<f64> for Jet3 {
    type Output = Jet3;
    #[inline]
    fn add(mut self, rhs: f64) -> Jet3 {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet3 {
    type Output = Jet3;
    #[inline]
    fn sub(mut self, rhs: f64) -> Jet3 {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    #[inline]
    fn mul(mut self, rhs: f64) -> Jet3 {
        for x in self.c.iter_mut() {
            *x *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet3 {
    type Output = Jet3;
    #[inline]
    fn div(self, rhs: f64) -> Jet3 {
        self * (1.0 / rhs)
    }
}

impl AddAssign for Jet3 {
    fn add_assign(&mut self, rhs: Jet3) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet3 {
    fn sub_assign(&mut self, rhs: Jet3) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet3 {
    fn mul_assign(&mut self, rhs: Jet3) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for Jet3 {
    fn sum<I: Iterator<Item = Jet3>>(iter: I) -> Jet3 {
        iter.fold(Jet3::ZERO, |a, b| a + b)
    }
}
