//! Scalars the interval gap forms are generic over.
//!
//! [`Interval`] gives the natural enclosure; [`Jet`] carries an interval
//! value together with interval enclosures of up to [`MAX_VARS`] partial
//! derivatives (forward mode), which feed the monotonicity and mean-value
//! refinements in the engine.

use core::ops::{Add, Mul, Neg, Sub};

use crate::error::Result;
use crate::interval::Interval;
use crate::specfun::{mu_deriv_interval, mu_interval, StirlingConfig};

pub const MAX_VARS: usize = 2;

pub trait GapScalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    /// A constant (zero derivative).
    fn cst(v: Interval) -> Self;
    fn value(&self) -> Interval;
    fn recip(self) -> Result<Self>;
    fn ln(self) -> Result<Self>;
    fn ln_1p(self) -> Result<Self>;
    fn mu(self, cfg: &StirlingConfig) -> Result<Self>;

    fn div(self, rhs: Self) -> Result<Self> {
        Ok(self * rhs.recip()?)
    }
}

impl GapScalar for Interval {
    fn cst(v: Interval) -> Self {
        v
    }
    fn value(&self) -> Interval {
        *self
    }
    fn recip(self) -> Result<Self> {
        Interval::recip(self)
    }
    fn ln(self) -> Result<Self> {
        Interval::ln(self)
    }
    fn ln_1p(self) -> Result<Self> {
        Interval::ln_1p(self)
    }
    fn mu(self, cfg: &StirlingConfig) -> Result<Self> {
        mu_interval(self, cfg)
    }
    fn div(self, rhs: Self) -> Result<Self> {
        Interval::div(self, rhs)
    }
}

/// Interval value with interval partial derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: Interval,
    pub d: [Interval; MAX_VARS],
}

const ZERO: Interval = Interval::point(0.0);

impl Jet {
    /// The `i`-th independent variable ranging over `v`.
    pub fn var(v: Interval, i: usize) -> Self {
        let mut d = [ZERO; MAX_VARS];
        d[i] = Interval::point(1.0);
        Jet { v, d }
    }

    fn is_const(&self) -> bool {
        self.d.iter().all(|d| *d == ZERO)
    }

    /// Chain rule with outer derivative `f1` and new value `v`.
    fn chain(&self, v: Interval, f1: Interval) -> Jet {
        let mut d = self.d;
        for di in d.iter_mut() {
            if *di != ZERO {
                *di = *di * f1;
            }
        }
        Jet { v, d }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut d = self.d;
        for (a, b) in d.iter_mut().zip(rhs.d.iter()) {
            *a = *a + *b;
        }
        Jet { v: self.v + rhs.v, d }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut d = self.d;
        for a in d.iter_mut() {
            *a = -*a;
        }
        Jet { v: -self.v, d }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut d = [ZERO; MAX_VARS];
        for (i, di) in d.iter_mut().enumerate() {
            *di = self.d[i] * rhs.v + self.v * rhs.d[i];
        }
        Jet { v: self.v * rhs.v, d }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        Jet { v: self.v + rhs, d: self.d }
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        Jet { v: self.v - rhs, d: self.d }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        let mut d = self.d;
        for a in d.iter_mut() {
            *a = *a * rhs;
        }
        Jet { v: self.v * rhs, d }
    }
}

impl GapScalar for Jet {
    fn cst(v: Interval) -> Self {
        Jet { v, d: [ZERO; MAX_VARS] }
    }
    fn value(&self) -> Interval {
        self.v
    }
    fn recip(self) -> Result<Self> {
        let r = self.v.recip()?;
        Ok(self.chain(r, -r.sqr()))
    }
    fn ln(self) -> Result<Self> {
        let v = self.v.ln()?;
        if self.is_const() {
            return Ok(Jet::cst(v));
        }
        Ok(self.chain(v, self.v.recip()?))
    }
    fn ln_1p(self) -> Result<Self> {
        let v = self.v.ln_1p()?;
        if self.is_const() {
            return Ok(Jet::cst(v));
        }
        Ok(self.chain(v, (self.v + 1.0).recip()?))
    }
    fn mu(self, cfg: &StirlingConfig) -> Result<Self> {
        let v = mu_interval(self.v, cfg)?;
        if self.is_const() {
            return Ok(Jet::cst(v));
        }
        Ok(self.chain(v, mu_deriv_interval(self.v)?))
    }
    fn div(self, rhs: Self) -> Result<Self> {
        if rhs.is_const() {
            let r = rhs.v.recip()?;
            let mut d = self.d;
            for a in d.iter_mut() {
                *a = *a * r;
            }
            return Ok(Jet { v: self.v.div(rhs.v)?, d });
        }
        Ok(self * rhs.recip()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn product_rule() {
        let x = Jet::var(Interval::point(3.0), 0);
        let y = Jet::var(Interval::point(5.0), 1);
        let f = x * x * y;
        assert_eq!(f.v, Interval::point(45.0));
        assert_eq!(f.d[0], Interval::point(30.0));
        assert_eq!(f.d[1], Interval::point(9.0));
    }

    #[test]
    fn elementary_derivatives_enclose_true_values() {
        let cfg = StirlingConfig::default();
        let x0 = 2.5;
        let x = Jet::var(Interval::point(x0), 0);
        let l = x.ln().unwrap();
        assert!(l.d[0].contains(1.0 / x0));
        let r = x.recip().unwrap();
        assert!(r.d[0].contains(-1.0 / (x0 * x0)));
        let lp = x.ln_1p().unwrap();
        assert!((lp.d[0].mid() - 1.0 / 3.5).abs() < 1e-15);
        let m = x.mu(&cfg).unwrap();
        let h = 1e-5;
        let fd = (crate::specfun::mu(x0 + h, &cfg).unwrap() - crate::specfun::mu(x0 - h, &cfg).unwrap()) / (2.0 * h);
        assert!((m.d[0].mid() - fd).abs() < 1e-8);
    }

    #[test]
    fn box_jets_enclose_derivative_range() {
        let x = Jet::var(iv(1.0, 2.0), 0);
        let f = (x * x).ln().unwrap();
        // d/dx ln(x^2) = 2/x ranges over [1, 2].
        assert!(f.d[0].contains_interval(&iv(1.0, 2.0)));
    }

    #[test]
    fn constants_have_zero_gradient() {
        let cfg = StirlingConfig::default();
        let c = Jet::cst(Interval::point(4.0));
        let g = c.mu(&cfg).unwrap().ln().unwrap();
        assert!(g.d.iter().all(|d| *d == Interval::point(0.0)));
    }
}
