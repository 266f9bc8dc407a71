//! Closed-form quantities of `l_p` balls and `p`-sums.
//!
//! Gamma quotients are formed as differences of `log_gamma_ref`, so
//! intermediate values never overflow; results are exponentiated last.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use crate::error::{domain, invalid, range, Result};
use crate::specfun::{log_gamma_ref, mu, StirlingConfig};

/// `ln Γ(1 + z)`.
fn lg1p(z: f64) -> Result<f64> {
    log_gamma_ref(1.0 + z)
}

fn checked_exp(l: f64, what: &str) -> Result<f64> {
    let v = libm::exp(l);
    if !(v.is_finite() && v > 0.0) {
        return Err(range!("{what}: exp({l}) is not representable"));
    }
    Ok(v)
}

/// The unit ball of the `p`-(quasi)norm in `R^n`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PBall {
    n: usize,
    p: f64,
}

impl PBall {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n < 1 {
            return Err(invalid!("dimension must be at least 1"));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(invalid!("exponent must be positive and finite, got {p}"));
        }
        Ok(PBall { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum InnerNorm {
    Euclidean,
    Ell1,
}

/// `{(x_1, ..., x_m) : ||x_1||^p + ... + ||x_m||^p <= 1}` with each `x_i` in
/// `R^{d_i}` carrying a Euclidean or `l_1` norm.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PSumBody {
    parts: Vec<(usize, InnerNorm)>,
    p: f64,
}

impl PSumBody {
    pub fn new(parts: Vec<(usize, InnerNorm)>, p: f64) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid!("a p-sum needs at least one part"));
        }
        if parts.iter().any(|(d, _)| *d < 1) {
            return Err(invalid!("part dimensions must be at least 1"));
        }
        if !(p > 0.0 && p <= 2.0) {
            return Err(invalid!("p-sum exponent must lie in (0, 2], got {p}"));
        }
        Ok(PSumBody { parts, p })
    }

    pub fn parts(&self) -> &[(usize, InnerNorm)] {
        &self.parts
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.parts.iter().map(|(d, _)| d).sum()
    }
}

/// `ln |B_p^n| = n ln(2 Γ(1 + 1/p)) - ln Γ(1 + n/p)`.
pub fn log_volume(ball: &PBall) -> Result<f64> {
    let (n, p) = (ball.n as f64, ball.p);
    Ok(n * (LN_2 + lg1p(1.0 / p)?) - lg1p(n / p)?)
}

/// `|B_p^n|`.
pub fn volume(ball: &PBall) -> Result<f64> {
    checked_exp(log_volume(ball)?, "volume")
}

/// `ln |B_2^d|`.
pub fn log_volume_euclidean(d: usize) -> Result<f64> {
    let d = d as f64;
    Ok(0.5 * d * libm::log(PI) - lg1p(0.5 * d)?)
}

/// Log-volume and dimension of a factor in a `p`-sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Factor {
    pub log_volume: f64,
    pub dim: usize,
}

impl Factor {
    pub fn part(dim: usize, norm: InnerNorm) -> Result<Factor> {
        let log_volume = match norm {
            InnerNorm::Euclidean => log_volume_euclidean(dim)?,
            // |B_1^d| = 2^d / d!
            InnerNorm::Ell1 => dim as f64 * LN_2 - lg1p(dim as f64)?,
        };
        Ok(Factor { log_volume, dim })
    }
}

/// `|K1 (+)_p K2| = |K1| |K2| Γ(1 + d1/p) Γ(1 + d2/p) / Γ(1 + (d1 + d2)/p)`.
pub fn psum_pair(a: Factor, b: Factor, p: f64) -> Result<Factor> {
    let (d1, d2) = (a.dim as f64, b.dim as f64);
    let log_volume = a.log_volume + b.log_volume + lg1p(d1 / p)? + lg1p(d2 / p)? - lg1p((d1 + d2) / p)?;
    Ok(Factor { log_volume, dim: a.dim + b.dim })
}

/// `ln |K|` by a left fold of [`psum_pair`].
pub fn log_volume_psum(body: &PSumBody) -> Result<f64> {
    let mut it = body.parts.iter();
    let (d, nm) = it.next().expect("validated nonempty");
    let mut acc = Factor::part(*d, *nm)?;
    for (d, nm) in it {
        acc = psum_pair(acc, Factor::part(*d, *nm)?, body.p)?;
    }
    Ok(acc.log_volume)
}

pub fn volume_psum(body: &PSumBody) -> Result<f64> {
    checked_exp(log_volume_psum(body)?, "p-sum volume")
}

/// `L^2 = Γ(1+3/p) Γ(1+n/p)^{1+2/n} / (12 Γ(1+(n+2)/p) Γ(1+1/p)^3)`.
pub fn isotropy_constant_sq(ball: &PBall) -> Result<f64> {
    let (n, p) = (ball.n as f64, ball.p);
    let l = lg1p(3.0 / p)? + (1.0 + 2.0 / n) * lg1p(n / p)? - libm::log(12.0) - lg1p((n + 2.0) / p)?
        - 3.0 * lg1p(1.0 / p)?;
    checked_exp(l, "isotropy constant")
}

/// `|B_p^n|^{(n-1)/n} / (sqrt(12) L)`: a lower bound for every central
/// hyperplane section.
pub fn hensley_lower_bound(ball: &PBall) -> Result<f64> {
    if ball.n < 2 {
        return Err(domain!("hyperplane sections need n >= 2"));
    }
    let n = ball.n as f64;
    let l = (n - 1.0) / n * log_volume(ball)? - 0.5 * libm::log(12.0) - 0.5 * libm::log(isotropy_constant_sq(ball)?);
    checked_exp(l, "hyperplane bound")
}

/// `n^{1/2 - 1/p} |B_2^k|^{1/k}`, a lower bound for `|E ∩ B_p^n|^{1/k}`
/// when `1 <= p <= 2` (from the inscribed ball `n^{1/2-1/p} B_2^n`).
pub fn ellipsoid_lower_bound(ball: &PBall, k: usize) -> Result<f64> {
    if !(1.0..=2.0).contains(&ball.p) {
        return Err(domain!("the inscribed-ellipsoid bound needs 1 <= p <= 2, got {}", ball.p));
    }
    if k < 1 || k > ball.n {
        return Err(domain!("section dimension {k} outside 1..={}", ball.n));
    }
    let n = ball.n as f64;
    let l = (0.5 - 1.0 / ball.p) * libm::log(n) + log_volume_euclidean(k)? / k as f64;
    checked_exp(l, "ellipsoid bound")
}

/// `n^{1 - 1/p} |B_1^n|^{1/n}`, a lower bound for `|E ∩ B_p^n|^{1/k}` when
/// `0 < p <= 1`, for every `k`.
pub fn meyer_pajor_lower_bound(ball: &PBall) -> Result<f64> {
    if ball.p > 1.0 {
        return Err(domain!("the l_1 comparison needs p <= 1, got {}", ball.p));
    }
    let n = ball.n as f64;
    let l = (1.0 - 1.0 / ball.p) * libm::log(n) + Factor::part(ball.n, InnerNorm::Ell1)?.log_volume / n;
    checked_exp(l, "l_1 comparison bound")
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LowPConstant {
    pub value: f64,
    pub log_value: f64,
    /// `value` underflowed to zero; `log_value` is still exact.
    pub underflow: bool,
}

/// `e^{1-1/p} / (Γ(1+1/p) p^{1/p})` for `0 < p <= 1`.
///
/// Evaluated as `1 + ln(p/(2π))/2 - mu(1/p)`, which is exact algebra and
/// free of the cancellation between `1/p` and `ln Γ(1 + 1/p)`.
pub fn low_p_constant(p: f64) -> Result<LowPConstant> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain!("low-p constant needs 0 < p <= 1, got {p}"));
    }
    if p == 1.0 {
        return Ok(LowPConstant { value: 1.0, log_value: 0.0, underflow: false });
    }
    let q = 1.0 / p;
    let m = if q.is_finite() { mu(q, &StirlingConfig::default())? } else { 0.0 };
    let log_value = 1.0 + 0.5 * libm::log(p / (2.0 * PI)) - m;
    let value = libm::exp(log_value);
    Ok(LowPConstant { value, log_value, underflow: value == 0.0 })
}

/// `|B_p^n ∩ E_0|_1 / |B_p^n|^{1/n}` for the diagonal line
/// `E_0 = span{(1, ..., 1)}`: `n^{1/2 - 1/p} Γ(1 + n/p)^{1/n} / Γ(1 + 1/p)`.
pub fn diagonal_section_ratio(ball: &PBall) -> Result<f64> {
    let (n, p) = (ball.n as f64, ball.p);
    let l = (0.5 - 1.0 / p) * libm::log(n) + lg1p(n / p)? / n - lg1p(1.0 / p)?;
    checked_exp(l, "diagonal section ratio")
}

/// Length of `B_p^n ∩ E_0`: the segment between `±n^{-1/p} (1, ..., 1)`.
pub fn diagonal_section_length(ball: &PBall) -> f64 {
    let n = ball.n as f64;
    2.0 * libm::pow(n, 0.5 - 1.0 / ball.p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ball(n: usize, p: f64) -> PBall {
        PBall::new(n, p).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn volume_examples() {
        assert!(rel(volume(&ball(2, 2.0)).unwrap(), PI) < 1e-13);
        assert!(rel(volume(&ball(2, 1.0)).unwrap(), 2.0) < 1e-13);
        assert!(rel(volume(&ball(3, 1.0)).unwrap(), 4.0 / 3.0) < 1e-13);
        assert!(rel(volume(&ball(3, 2.0)).unwrap(), 4.0 * PI / 3.0) < 1e-13);
    }

    #[test]
    fn volume_overflow_is_a_range_error() {
        assert!(matches!(volume(&ball(2000, 0.01)), Err(crate::Error::Range(_))));
        assert!(log_volume(&ball(2000, 0.01)).is_ok());
    }

    #[test]
    fn invalid_balls() {
        assert!(PBall::new(0, 1.0).is_err());
        assert!(PBall::new(3, 0.0).is_err());
        assert!(PBall::new(3, f64::NAN).is_err());
        assert!(PSumBody::new(vec![], 1.0).is_err());
        assert!(PSumBody::new(vec![(2, InnerNorm::Euclidean)], 2.5).is_err());
        assert!(PSumBody::new(vec![(0, InnerNorm::Euclidean)], 1.0).is_err());
    }

    #[test]
    fn psum_examples() {
        let p = 1.3;
        let two = PSumBody::new(vec![(1, InnerNorm::Euclidean), (1, InnerNorm::Euclidean)], p).unwrap();
        assert!(rel(volume_psum(&two).unwrap(), volume(&ball(2, p)).unwrap()) < 1e-13);
        let k = PSumBody::new(vec![(2, InnerNorm::Euclidean), (2, InnerNorm::Euclidean)], 1.0).unwrap();
        assert!(rel(volume_psum(&k).unwrap(), PI * PI / 6.0) < 1e-13);
        for n in 1..6 {
            let k = PSumBody::new(vec![(n, InnerNorm::Euclidean), (n, InnerNorm::Euclidean)], 2.0).unwrap();
            let full = libm::exp(log_volume_euclidean(2 * n).unwrap());
            assert!(rel(volume_psum(&k).unwrap(), full) < 1e-12);
        }
    }

    #[test]
    fn ell1_parts_reproduce_cross_polytope() {
        // (+)_1 of l_1 parts is the l_1 ball of the total dimension.
        let k = PSumBody::new(vec![(2, InnerNorm::Ell1), (3, InnerNorm::Ell1)], 1.0).unwrap();
        assert!(rel(volume_psum(&k).unwrap(), volume(&ball(5, 1.0)).unwrap()) < 1e-12);
    }

    #[test]
    fn psum_fold_is_associative() {
        let p = 0.7;
        let a = Factor::part(2, InnerNorm::Euclidean).unwrap();
        let b = Factor::part(3, InnerNorm::Ell1).unwrap();
        let c = Factor::part(1, InnerNorm::Euclidean).unwrap();
        let left = psum_pair(psum_pair(a, b, p).unwrap(), c, p).unwrap();
        let right = psum_pair(a, psum_pair(b, c, p).unwrap(), p).unwrap();
        assert!(rel(libm::exp(left.log_volume), libm::exp(right.log_volume)) < 1e-12);
    }

    #[test]
    fn isotropy_examples() {
        for p in [0.5, 1.0, 1.5, 2.0, 3.0] {
            assert!((isotropy_constant_sq(&ball(1, p)).unwrap() - 1.0 / 12.0).abs() < 1e-14);
        }
        // Euclidean disc: L^2 = 1/(4π).
        assert!(rel(isotropy_constant_sq(&ball(2, 2.0)).unwrap(), 1.0 / (4.0 * PI)) < 1e-12);
    }

    #[test]
    fn hensley_bound_below_disc_chord() {
        let b = hensley_lower_bound(&ball(2, 2.0)).unwrap();
        let expected = libm::sqrt(PI) / libm::sqrt(12.0 * isotropy_constant_sq(&ball(2, 2.0)).unwrap());
        assert!(rel(b, expected) < 1e-13);
        assert!(b <= 2.0);
        assert!(hensley_lower_bound(&ball(1, 2.0)).is_err());
    }

    #[test]
    fn ellipsoid_bound_examples() {
        for k in 1..=6 {
            let b = ellipsoid_lower_bound(&ball(6, 2.0), k).unwrap();
            let expected = libm::exp(log_volume_euclidean(k).unwrap() / k as f64);
            assert!(rel(b, expected) < 1e-14);
        }
        assert!(ellipsoid_lower_bound(&ball(5, 0.5), 2).is_err());
        assert!(ellipsoid_lower_bound(&ball(5, 1.0), 6).is_err());
        let b = ellipsoid_lower_bound(&ball(5, 1.0), 2).unwrap();
        assert!(rel(b, libm::sqrt(PI / 5.0)) < 1e-14);
    }

    #[test]
    fn low_p_constant_examples() {
        assert_eq!(low_p_constant(1.0).unwrap().value, 1.0);
        assert!((low_p_constant(1.0 - 1e-12).unwrap().value - 1.0).abs() < 1e-10);
        let grid: Vec<f64> = (1..=20).map(|i| low_p_constant(0.05 * i as f64).unwrap().value).collect();
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        for p in [1e-3, 1e-4] {
            let ratio = low_p_constant(p).unwrap().value / (core::f64::consts::E * libm::sqrt(p / (2.0 * PI)));
            assert!((ratio - 1.0).abs() < 0.02);
        }
        let tiny = low_p_constant(1e-300).unwrap();
        assert!(!tiny.underflow && tiny.value > 0.0);
        assert!(low_p_constant(0.0).is_err());
        assert!(low_p_constant(1.5).is_err());
    }

    #[test]
    fn low_p_constant_matches_gamma_form() {
        for p in [0.1, 0.3, 0.77] {
            let q = 1.0 / p;
            let direct = 1.0 - q - lg1p(q).unwrap() - q * libm::log(p);
            assert!((low_p_constant(p).unwrap().log_value - direct).abs() < 1e-11);
        }
    }

    #[test]
    fn diagonal_ratio_examples() {
        assert!((diagonal_section_ratio(&ball(2, 1.0)).unwrap() - 1.0).abs() < 1e-14);
        for p in [0.3, 1.0, 2.5] {
            assert!((diagonal_section_ratio(&ball(1, p)).unwrap() - 1.0).abs() < 1e-13);
        }
        for (n, p) in [(3, 0.5), (4, 1.5), (6, 2.0)] {
            let b = ball(n, p);
            let via_length = diagonal_section_length(&b) / libm::pow(volume(&b).unwrap(), 1.0 / n as f64);
            assert!(rel(diagonal_section_ratio(&b).unwrap(), via_length) < 1e-12);
        }
        let (n, p) = (3.0f64, 1e-3f64);
        let asym = libm::pow(p, 0.5 - 0.5 / n) * libm::pow(n, 0.5 + 0.5 / n) / libm::pow(2.0 * PI, 0.5 - 0.5 / n);
        let r = diagonal_section_ratio(&ball(3, p)).unwrap();
        assert!((r / asym - 1.0).abs() < 0.03);
    }
}
