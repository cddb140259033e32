//! Forward-mode automatic differentiation: a second-order dual number in two
//! variables. One evaluation of a closed-form state equation on [`Dual2`]
//! inputs yields the value, the gradient and the Hessian, which is exactly
//! what the derivative engine needs to cross-check hand-written derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic shared by `f64` and [`Dual2`], so the state equations can be
/// written once and evaluated either plainly or with derivatives attached.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn value(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn recip(self) -> Self;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(self) -> f64 {
        self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn recip(self) -> Self {
        f64::recip(self)
    }
}

/// Second-order two-variable dual number: value `v`, first derivatives
/// `(d1, d2)` and second derivatives `(d11, d12, d22)` with respect to the
/// two seeded variables.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

impl Dual2 {
    pub fn constant(v: f64) -> Self {
        Dual2 { v, ..Dual2::default() }
    }

    /// Seed for the first independent variable.
    pub fn var1(x: f64) -> Self {
        Dual2 { v: x, d1: 1.0, ..Dual2::default() }
    }

    /// Seed for the second independent variable.
    pub fn var2(x: f64) -> Self {
        Dual2 { v: x, d2: 1.0, ..Dual2::default() }
    }

    pub fn gradient(&self) -> (f64, f64) {
        (self.d1, self.d2)
    }

    /// Propagates a smooth unary function through the jet given its value and
    /// first two derivatives at `self.v`.
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Dual2 {
            v: f0,
            d1: f1 * self.d1,
            d2: f1 * self.d2,
            d11: f2 * self.d1 * self.d1 + f1 * self.d11,
            d12: f2 * self.d1 * self.d2 + f1 * self.d12,
            d22: f2 * self.d2 * self.d2 + f1 * self.d22,
        }
    }
}

impl Add for Dual2 {
    type Output = Dual2;
    fn add(self, o: Dual2) -> Dual2 {
        Dual2 {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d11: self.d11 + o.d11,
            d12: self.d12 + o.d12,
            d22: self.d22 + o.d22,
        }
    }
}

impl Sub for Dual2 {
    type Output = Dual2;
    fn sub(self, o: Dual2) -> Dual2 {
        Dual2 {
            v: self.v - o.v,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
            d11: self.d11 - o.d11,
            d12: self.d12 - o.d12,
            d22: self.d22 - o.d22,
        }
    }
}

impl Neg for Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        Dual2 {
            v: -self.v,
            d1: -self.d1,
            d2: -self.d2,
            d11: -self.d11,
            d12: -self.d12,
            d22: -self.d22,
        }
    }
}

impl Mul for Dual2 {
    type Output = Dual2;
    fn mul(self, o: Dual2) -> Dual2 {
        Dual2 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + self.v * o.d2,
            d11: self.d11 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d11,
            d12: self.d12 * o.v + self.d1 * o.d2 + self.d2 * o.d1 + self.v * o.d12,
            d22: self.d22 * o.v + 2.0 * self.d2 * o.d2 + self.v * o.d22,
        }
    }
}

impl Div for Dual2 {
    type Output = Dual2;
    #[allow(clippy::suspicious_arithmetic_impl)] // quotient rule via the reciprocal jet
    fn div(self, o: Dual2) -> Dual2 {
        self * o.recip()
    }
}

impl Add<f64> for Dual2 {
    type Output = Dual2;
    fn add(self, c: f64) -> Dual2 {
        Dual2 { v: self.v + c, ..self }
    }
}

impl Sub<f64> for Dual2 {
    type Output = Dual2;
    fn sub(self, c: f64) -> Dual2 {
        Dual2 { v: self.v - c, ..self }
    }
}

impl Mul<f64> for Dual2 {
    type Output = Dual2;
    fn mul(self, c: f64) -> Dual2 {
        Dual2 {
            v: self.v * c,
            d1: self.d1 * c,
            d2: self.d2 * c,
            d11: self.d11 * c,
            d12: self.d12 * c,
            d22: self.d22 * c,
        }
    }
}

impl Scalar for Dual2 {
    fn from_f64(x: f64) -> Self {
        Dual2::constant(x)
    }
    fn value(self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }
    fn powf(self, p: f64) -> Self {
        let x = self.v;
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }
    fn recip(self) -> Self {
        let x = self.v;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }
}
