//! Closed real intervals with outward rounding.
//!
//! Addition, subtraction, multiplication, division and square root use
//! error-free transformations (two-sum, fma residuals) to detect whether the
//! nearest-rounded endpoint is already a valid bound; only inexact endpoints
//! are stepped one ulp outward, so exact results stay exact. The elementary
//! functions (`exp`, `ln`, `ln_1p`) evaluate the `libm` kernel at the
//! endpoints and widen by two ulps.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{domain, invalid, range, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[inline]
fn down(x: f64) -> f64 {
    x.next_down()
}

#[inline]
fn up(x: f64) -> f64 {
    x.next_up()
}

#[inline]
fn down_n(x: f64, n: u32) -> f64 {
    (0..n).fold(x, |v, _| v.next_down())
}

#[inline]
fn up_n(x: f64, n: u32) -> f64 {
    (0..n).fold(x, |v, _| v.next_up())
}

/// Rounding error of `a + b` as computed by Knuth's two-sum.
#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
fn sum_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    if two_sum_err(a, b, s) < 0.0 {
        down(s)
    } else {
        s
    }
}

#[inline]
fn sum_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    if two_sum_err(a, b, s) > 0.0 {
        up(s)
    } else {
        s
    }
}

/// Signed rounding error `a*b - fl(a*b)`, or `None` when the fma residual
/// cannot be trusted (underflow or non-finite product).
#[inline]
fn prod_err(a: f64, b: f64, p: f64) -> Option<f64> {
    if !p.is_finite() || (p.abs() < f64::MIN_POSITIVE * 4.0 && a != 0.0 && b != 0.0) {
        return None;
    }
    Some(libm::fma(a, b, -p))
}

#[inline]
fn prod_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    match prod_err(a, b, p) {
        Some(e) if e >= 0.0 => p,
        Some(_) => down(p),
        None if p.is_infinite() => p,
        None => down(p),
    }
}

#[inline]
fn prod_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    match prod_err(a, b, p) {
        Some(e) if e <= 0.0 => p,
        Some(_) => up(p),
        None if p.is_infinite() => p,
        None => up(p),
    }
}

/// `a / b` rounded towards -inf (`b != 0`).
#[inline]
fn quot_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() || q.abs() < f64::MIN_POSITIVE * 4.0 {
        return if q.is_finite() { down(q) } else { q };
    }
    // a - q*b exactly; its sign relative to b tells on which side a/b lies.
    let r = libm::fma(-q, b, a);
    if (r < 0.0) == (b > 0.0) && r != 0.0 {
        down(q)
    } else {
        q
    }
}

#[inline]
fn quot_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() || q.abs() < f64::MIN_POSITIVE * 4.0 {
        return if q.is_finite() { up(q) } else { q };
    }
    let r = libm::fma(-q, b, a);
    if (r > 0.0) == (b > 0.0) && r != 0.0 {
        up(q)
    } else {
        q
    }
}

impl Interval {
    /// `[lo, hi]`; fails unless both endpoints are finite and `lo <= hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(invalid!("interval endpoints must be finite, got [{lo}, {hi}]"));
        }
        if lo > hi {
            return Err(invalid!("interval with lo > hi: [{lo}, {hi}]"));
        }
        Ok(Self { lo, hi })
    }

    /// The degenerate interval `[x, x]`, for values that are exact in binary.
    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// One-ulp enclosure of a rounded constant such as `ln 6` or `pi`.
    pub fn enclose(x: f64) -> Self {
        Self { lo: down(x), hi: up(x) }
    }

    /// Smallest interval holding both values, in any order.
    pub fn hull_of(a: f64, b: f64) -> Self {
        Self { lo: a.min(b), hi: a.max(b) }
    }

    pub(crate) fn from_bounds_unchecked(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "[{lo}, {hi}]");
        Self { lo, hi }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn rad(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Splits at the midpoint; both halves share the midpoint.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }

    /// Largest absolute value over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn mul_f64(self, c: f64) -> Interval {
        self * Interval::point(c)
    }

    pub fn add_f64(self, c: f64) -> Interval {
        self + Interval::point(c)
    }

    pub fn sqr(self) -> Interval {
        if self.lo >= 0.0 {
            Interval { lo: prod_down(self.lo, self.lo), hi: prod_up(self.hi, self.hi) }
        } else if self.hi <= 0.0 {
            Interval { lo: prod_down(self.hi, self.hi), hi: prod_up(self.lo, self.lo) }
        } else {
            let m = self.mag();
            Interval { lo: 0.0, hi: prod_up(m, m) }
        }
    }

    /// Integer power by repeated squaring; even powers use `sqr` so the
    /// result stays nonnegative.
    pub fn powi(self, n: u32) -> Interval {
        match n {
            0 => Interval::point(1.0),
            1 => self,
            _ if n % 2 == 0 => self.powi(n / 2).sqr(),
            _ => self.powi(n - 1) * self,
        }
    }

    pub fn recip(self) -> Result<Interval> {
        Interval::point(1.0).div(self)
    }

    pub fn div(self, rhs: Interval) -> Result<Interval> {
        if rhs.lo <= 0.0 && rhs.hi >= 0.0 {
            return Err(domain!("division by an interval containing zero: {rhs}"));
        }
        let cands = [(self.lo, rhs.lo), (self.lo, rhs.hi), (self.hi, rhs.lo), (self.hi, rhs.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in cands {
            lo = lo.min(quot_down(a, b));
            hi = hi.max(quot_up(a, b));
        }
        Ok(Interval { lo, hi })
    }

    pub fn sqrt(self) -> Result<Interval> {
        if self.lo < 0.0 {
            return Err(domain!("sqrt of {self}"));
        }
        let sq_down = |x: f64| {
            let r = libm::sqrt(x);
            if libm::fma(-r, r, x) < 0.0 {
                down(r).max(0.0)
            } else {
                r
            }
        };
        let sq_up = |x: f64| {
            let r = libm::sqrt(x);
            if libm::fma(-r, r, x) > 0.0 {
                up(r)
            } else {
                r
            }
        };
        Ok(Interval { lo: sq_down(self.lo), hi: sq_up(self.hi) })
    }

    pub fn exp(self) -> Result<Interval> {
        let e = |x: f64| if x == 0.0 { (1.0, 1.0) } else {
            let v = libm::exp(x);
            (down_n(v, 2).max(0.0), up_n(v, 2))
        };
        let (lo, _) = e(self.lo);
        let (_, hi) = e(self.hi);
        if !hi.is_finite() {
            return Err(range!("exp overflow at {}", self.hi));
        }
        Ok(Interval { lo, hi })
    }

    pub fn ln(self) -> Result<Interval> {
        if self.lo <= 0.0 {
            return Err(domain!("ln of {self}"));
        }
        let l = |x: f64| if x == 1.0 { (0.0, 0.0) } else {
            let v = libm::log(x);
            (down_n(v, 2), up_n(v, 2))
        };
        Ok(Interval { lo: l(self.lo).0, hi: l(self.hi).1 })
    }

    /// `ln(1 + x)`, accurate for small `x`.
    pub fn ln_1p(self) -> Result<Interval> {
        if self.lo <= -1.0 {
            return Err(domain!("ln_1p of {self}"));
        }
        let l = |x: f64| if x == 0.0 { (0.0, 0.0) } else {
            let v = libm::log1p(x);
            (down_n(v, 2), up_n(v, 2))
        };
        Ok(Interval { lo: l(self.lo).0, hi: l(self.hi).1 })
    }

    /// `self^e = exp(e ln self)` for a positive base.
    pub fn pow(self, e: Interval) -> Result<Interval> {
        if self.lo <= 0.0 {
            return Err(domain!("pow with non-positive base {self}"));
        }
        (e * self.ln()?).exp()
    }

    pub fn min(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.min(other.hi) }
    }

    pub fn max(self, other: Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval { lo: sum_down(self.lo, rhs.lo), hi: sum_up(self.hi, rhs.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval { lo: sum_down(self.lo, -rhs.hi), hi: sum_up(self.hi, -rhs.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        if self.is_point() && self.lo == 0.0 || rhs.is_point() && rhs.lo == 0.0 {
            return Interval::point(0.0);
        }
        let cands = [(self.lo, rhs.lo), (self.lo, rhs.hi), (self.hi, rhs.lo), (self.hi, rhs.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in cands {
            lo = lo.min(prod_down(a, b));
            hi = hi.max(prod_up(a, b));
        }
        Interval { lo, hi }
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn exact_integer_sum() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
    }

    #[test]
    fn symmetric_product() {
        assert_eq!(iv(-1.0, 1.0) * iv(-1.0, 1.0), iv(-1.0, 1.0));
    }

    #[test]
    fn exact_rational_quotient() {
        let q = iv(1.0, 2.0).div(iv(0.5, 1.0)).unwrap();
        assert!(q.contains_interval(&iv(1.0, 4.0)));
        assert_eq!(q, iv(1.0, 4.0));
    }

    #[test]
    fn inexact_sum_is_widened() {
        let s = Interval::point(0.1) + Interval::point(0.2);
        assert!(s.lo() < s.hi());
        assert!(s.contains(0.30000000000000004) || s.contains(0.3));
    }

    #[test]
    fn third_is_enclosed() {
        let t = Interval::point(1.0).div(Interval::point(3.0)).unwrap();
        assert!(t.lo() < t.hi());
        assert_eq!(t.hi(), t.lo().next_up());
    }

    #[test]
    fn division_by_zero_interval() {
        assert!(matches!(iv(1.0, 2.0).div(iv(-1.0, 1.0)), Err(crate::Error::Domain(_))));
        assert!(iv(1.0, 2.0).div(iv(0.0, 1.0)).is_err());
    }

    #[test]
    fn constructor_rejects_reversed() {
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn exp_of_zero() {
        assert_eq!(Interval::point(0.0).exp().unwrap(), Interval::point(1.0));
    }

    #[test]
    fn log_of_one_to_e() {
        let l = iv(1.0, core::f64::consts::E).ln().unwrap();
        assert_eq!(l.lo(), 0.0);
        assert!(l.contains(1.0));
        assert!(l.hi() - 1.0 < 1e-15);
    }

    #[test]
    fn pow_square_root() {
        let r = Interval::point(4.0).pow(Interval::point(0.5)).unwrap();
        assert!(r.contains(2.0));
        assert!(r.width() < 1e-14);
    }

    #[test]
    fn sqrt_exact_and_domain() {
        assert_eq!(Interval::point(4.0).sqrt().unwrap(), Interval::point(2.0));
        let s = Interval::point(2.0).sqrt().unwrap();
        assert!(s.contains(core::f64::consts::SQRT_2));
        assert!(iv(-1.0, 1.0).sqrt().is_err());
        assert!(iv(0.0, 1.0).ln().is_err());
        assert!(iv(-1.0, 0.0).ln_1p().is_err());
    }

    #[test]
    fn even_power_of_straddling_interval() {
        assert_eq!(iv(-2.0, 1.0).powi(2), iv(0.0, 4.0));
        assert!(iv(-2.0, 1.0).powi(3).contains_interval(&iv(-8.0, 1.0)));
    }

    #[test]
    fn exp_overflow_is_range_error() {
        assert!(matches!(Interval::point(1000.0).exp(), Err(crate::Error::Range(_))));
    }
}
