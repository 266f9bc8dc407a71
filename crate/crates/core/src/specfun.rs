//! Gamma-function layer.
//!
//! Two argument conventions coexist and are kept apart by name:
//!
//! * `log_gamma_stirling(x)` and everything built on the Stirling remainder
//!   `mu` return `ln Γ(1 + x)`;
//! * `log_gamma_ref(z)` is an independent Lanczos evaluation of `ln Γ(z)`.
//!
//! The remainder is `mu(x) = 1/(12x) - (1/3) ∫_0^∞ p3(t) / (t + x)^3 dt`
//! with `p3` the 1-periodic cubic `t^3 - 3t^2/2 + t/2`. The integral is
//! accumulated period by period with 16-point Gauss–Legendre; after `T`
//! periods the remaining integral equals `mu(x + T) - 1/(12(x + T))`, which
//! is evaluated from the enveloping Bernoulli series with an explicit bound
//! on the neglected term.

use crate::error::{domain, range, Error, Result};
use crate::interval::Interval;
use alloc::format;

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Positive Gauss–Legendre nodes and weights of order 16 on `[-1, 1]`.
pub(crate) const GL16_NODES: [f64; 8] = [
    0.095_012_509_837_637_45,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_37,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
pub(crate) const GL16_WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_59,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_62,
    0.149_595_988_816_576_76,
    0.124_628_971_255_534_03,
    0.095_158_511_682_492_59,
    0.062_253_523_938_647_706,
    0.027_152_459_411_754_037,
];

/// `B_{2k} / (2k (2k-1))` for k = 1..6: the Stirling series of `mu`.
const MU_SERIES: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
];
/// Magnitude coefficient of the first neglected term, `B_14 / (14 * 13)`.
const MU_SERIES_NEXT: f64 = 1.0 / 156.0;

/// Evaluation policy for the Stirling remainder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StirlingConfig {
    quad_tol: f64,
    max_periods: u32,
}

impl StirlingConfig {
    pub const DEFAULT: StirlingConfig = StirlingConfig { quad_tol: 1e-13, max_periods: 1_000_000 };

    pub fn new(quad_tol: f64, max_periods: u32) -> Result<Self> {
        if !(quad_tol > 0.0 && quad_tol.is_finite()) {
            return Err(Error::InvalidInput(format!("quad_tol must be positive, got {quad_tol}")));
        }
        if max_periods < 1 {
            return Err(Error::InvalidInput("max_periods must be at least 1".into()));
        }
        Ok(Self { quad_tol, max_periods })
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    pub fn max_periods(&self) -> u32 {
        self.max_periods
    }
}

impl Default for StirlingConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[inline]
fn p3_unit(s: f64) -> f64 {
    s * (0.5 + s * (-1.5 + s))
}

/// The 1-periodic cubic kernel; `|p3| <= sqrt(3)/36 < 1/20`.
pub fn p3(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain!("p3 requires t >= 0, got {t}"));
    }
    Ok(p3_unit(t - libm::floor(t)))
}

/// Largest value of `|p3|`, attained at `t = (3 ± sqrt 3) / 6`.
pub const P3_MAX_ABS: f64 = 0.048_112_522_432_468_816;

fn mu_series(u: f64) -> f64 {
    let r = 1.0 / u;
    let r2 = r * r;
    let mut acc = 0.0;
    for c in MU_SERIES.iter().rev() {
        acc = acc * r2 + c;
    }
    acc * r
}

fn mu_series_bound(u: f64) -> f64 {
    MU_SERIES_NEXT / libm::pow(u, 13.0)
}

/// Value and absolute error bound of the remainder at a point.
#[derive(Clone, Copy, Debug)]
pub(crate) struct MuParts {
    pub value: f64,
    pub err: f64,
}

/// `∫_0^T p3(t)/(t+x)^3 dt` over whole periods, with the sum of absolute
/// contributions (for the roundoff bound) and the number of nodes used.
fn periodic_integral(x: f64, periods: u32) -> (f64, f64, usize) {
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut abs_sum = 0.0;
    let mut nodes = 0usize;
    let mut panel = |a: f64, b: f64, shift: f64, sum: &mut f64, comp: &mut f64| {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (xi, w) in GL16_NODES.iter().zip(GL16_WEIGHTS.iter()) {
            for s in [mid - half * xi, mid + half * xi] {
                let d = s + shift;
                let v = w * p3_unit(s) / (d * d * d);
                acc += v;
                abs_sum += v.abs();
            }
        }
        let term = half * acc;
        // Neumaier summation across panels.
        let t = *sum + term;
        if sum.abs() >= term.abs() {
            *comp += (*sum - t) + term;
        } else {
            *comp += (term - t) + *sum;
        }
        *sum = t;
        nodes += 16;
    };
    for k in 0..periods {
        let shift = k as f64 + x;
        if shift >= 1.0 {
            panel(0.0, 1.0, shift, &mut sum, &mut comp);
        } else {
            // Graded panels: each panel no wider than its distance to the pole at -shift.
            let mut a = 0.0;
            while a < 1.0 {
                let b = (a + (a + shift)).min(1.0);
                panel(a, b, shift, &mut sum, &mut comp);
                a = b;
            }
        }
    }
    (sum + comp, abs_sum * 0.5, nodes)
}

pub(crate) fn mu_parts(x: f64, cfg: &StirlingConfig) -> Result<MuParts> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain!("mu requires x > 0, got {x}"));
    }
    let target = 0.5 * cfg.quad_tol;
    let u_req = libm::pow(MU_SERIES_NEXT / target, 1.0 / 13.0);
    let periods_f = if x >= u_req { 0.0 } else { libm::ceil(u_req - x) };
    if periods_f > cfg.max_periods as f64 {
        let achieved = mu_series_bound(x + cfg.max_periods as f64);
        return Err(Error::Inconclusive {
            what: format!("mu({x}) needs {periods_f} periods for tolerance {:e}", cfg.quad_tol),
            achieved,
        });
    }
    let periods = periods_f as u32;
    let eps = f64::EPSILON;
    if periods == 0 {
        let value = mu_series(x);
        let err = mu_series_bound(x) + 8.0 * eps * value.abs();
        return Ok(MuParts { value, err });
    }
    let u = x + periods as f64;
    let (integral, abs_sum, nodes) = periodic_integral(x, periods);
    let head = 1.0 / (12.0 * x);
    let tail = mu_series(u) - 1.0 / (12.0 * u);
    let value = head - integral / 3.0 + tail;
    let roundoff = (nodes as f64 + 16.0) * eps * abs_sum / 3.0
        + 8.0 * eps * (head.abs() + tail.abs() + 1.0 / (12.0 * u));
    Ok(MuParts { value, err: mu_series_bound(u) + roundoff })
}

/// Stirling remainder `mu(x)` with `Γ(1+x) = x^x e^{-x} sqrt(2πx) e^{mu(x)}`.
pub fn mu(x: f64, cfg: &StirlingConfig) -> Result<f64> {
    mu_parts(x, cfg).map(|m| m.value)
}

/// Rigorous enclosure of `mu` at a single point.
pub fn mu_enclosure(x: f64, cfg: &StirlingConfig) -> Result<Interval> {
    let m = mu_parts(x, cfg)?;
    Ok(Interval::from_bounds_unchecked(
        (m.value - m.err).next_down().max(0.0),
        (m.value + m.err).next_up(),
    ))
}

/// `mu` is positive and decreasing on `(0, ∞)`.
pub fn mu_interval(x: Interval, cfg: &StirlingConfig) -> Result<Interval> {
    if x.lo() <= 0.0 {
        return Err(domain!("mu requires x > 0, got {x}"));
    }
    let hi = mu_enclosure(x.lo(), cfg)?;
    let lo = if x.is_point() { hi } else { mu_enclosure(x.hi(), cfg)? };
    Ok(Interval::from_bounds_unchecked(lo.lo(), hi.hi()))
}

/// `ln Γ(1 + x)` via Stirling's formula with the quadrature remainder.
pub fn log_gamma_stirling(x: f64, cfg: &StirlingConfig) -> Result<f64> {
    let m = mu(x, cfg)?;
    Ok(x * libm::log(x) - x + 0.5 * (LN_2PI + libm::log(x)) + m)
}

fn stirling_main_interval(x: Interval) -> Result<Interval> {
    let lx = x.ln()?;
    Ok(x * lx - x + (Interval::enclose(LN_2PI) + lx) * 0.5)
}

/// Enclosure of `ln Γ(1 + x)` over an interval of arguments.
///
/// On `x >= 1/2` the function is increasing, so endpoint enclosures suffice;
/// below that the Stirling expression is extended naturally.
pub fn log_gamma_stirling_interval(x: Interval, cfg: &StirlingConfig) -> Result<Interval> {
    if x.lo() <= 0.0 {
        return Err(domain!("log_gamma_stirling requires x > 0, got {x}"));
    }
    if x.lo() >= 0.5 {
        let at = |v: f64| -> Result<Interval> {
            Ok(stirling_main_interval(Interval::point(v))? + mu_enclosure(v, cfg)?)
        };
        let lo = at(x.lo())?;
        let hi = if x.is_point() { lo } else { at(x.hi())? };
        return Ok(Interval::from_bounds_unchecked(lo.lo(), hi.hi()));
    }
    Ok(stirling_main_interval(x)? + mu_interval(x, cfg)?)
}

/// `Γ(1 + x)^e` as an interval.
pub fn gamma_pow_interval(x: Interval, e: Interval, cfg: &StirlingConfig) -> Result<Interval> {
    (e * log_gamma_stirling_interval(x, cfg)?).exp()
}

/// Enclosure of `p3` over an interval of `t >= 0`.
pub fn p3_interval(t: Interval) -> Result<Interval> {
    if t.lo() < 0.0 {
        return Err(domain!("p3 requires t >= 0, got {t}"));
    }
    let bound = Interval::from_bounds_unchecked(-P3_MAX_ABS.next_up(), P3_MAX_ABS.next_up());
    let k = libm::floor(t.lo());
    if t.hi() - k > 1.0 {
        return Ok(bound);
    }
    let s = t - Interval::point(k);
    let s = Interval::from_bounds_unchecked(s.lo().max(0.0), s.hi().min(1.0));
    // s (s - 1/2)(s - 1): a factored form keeps the enclosure tight near the zeros.
    let f = s * (s - 0.5) * (s - 1.0);
    Ok(f.intersect(&bound).unwrap_or(bound))
}

// --- independent reference: Lanczos approximation (Pugh, r = 10.900511) ---

const LANCZOS_R: f64 = 10.900511;
const LANCZOS_D: [f64; 11] = [
    2.485_740_891_387_535_6e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_3,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_6,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412_3e-2,
    -5.719_261_174_043_057_8e-4,
    4.633_994_733_599_056_4e-6,
    -2.719_949_084_886_077_2e-9,
];
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

fn lanczos_sum(z: f64) -> (f64, f64) {
    let mut s = LANCZOS_D[0];
    let mut ds = 0.0;
    for (i, d) in LANCZOS_D.iter().enumerate().skip(1) {
        let den = z + i as f64 - 1.0;
        s += d / den;
        ds -= d / (den * den);
    }
    (s, ds)
}

/// `ln Γ(z)` for `z > 0`, independent of the Stirling path.
pub fn log_gamma_ref(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain!("log_gamma_ref requires z > 0, got {z}"));
    }
    if z < 0.5 {
        let s = libm::sin(core::f64::consts::PI * z);
        return Ok(LN_PI - libm::log(s) - log_gamma_ref(1.0 - z)?);
    }
    let (s, _) = lanczos_sum(z);
    let zh = z - 0.5;
    Ok(libm::log(s) + LN_2_SQRT_E_OVER_PI + zh * (libm::log(zh + LANCZOS_R) - 1.0))
}

/// Digamma from the derivative of the Lanczos approximation.
///
/// Not rigorous; a test oracle for the envelopes below.
pub fn digamma_ref(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain!("digamma_ref requires z > 0, got {z}"));
    }
    if z < 0.5 {
        let pz = core::f64::consts::PI * z;
        return Ok(digamma_ref(1.0 - z)? - core::f64::consts::PI * libm::cos(pz) / libm::sin(pz));
    }
    let (s, ds) = lanczos_sum(z);
    let zh = z - 0.5;
    Ok(ds / s + libm::log(zh + LANCZOS_R) - 1.0 + zh / (zh + LANCZOS_R))
}

/// Four-term upper envelope of `ψ(1 + x)`.
pub fn digamma_upper(x: f64) -> Result<f64> {
    if !(1.0 + x > 0.0) || !x.is_finite() {
        return Err(domain!("digamma_upper requires 1 + x > 0, got x = {x}"));
    }
    let z = x + 1.0;
    let z2 = z * z;
    Ok(libm::log(z) - 0.5 / z - (1.0 / 12.0) / z2 + (1.0 / 120.0) / (z2 * z2))
}

/// Bracket `[lower, upper]` for `ψ'(z)` from
/// `ψ'(z) = 1/z + 1/(2z^2) + 1/(6z^3) - θ(z)/(30 z^5)`, `θ ∈ [0, 1]`.
pub fn trigamma_envelope(z: f64) -> Result<(f64, f64)> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain!("trigamma_envelope requires z > 0, got {z}"));
    }
    let upper = 1.0 / z + 0.5 / (z * z) + 1.0 / (6.0 * z * z * z);
    let lower = upper - 1.0 / (30.0 * libm::pow(z, 5.0));
    Ok((lower, upper))
}

/// `Γ(1 + x)^e`.
pub fn gamma_pow(x: f64, e: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain!("gamma_pow requires x > 0, got {x}"));
    }
    let l = e * log_gamma_ref(1.0 + x)?;
    if !(l.abs() <= 700.0) {
        return Err(range!("gamma_pow exponent {l} out of range"));
    }
    Ok(libm::exp(l))
}

// --- rigorous digamma and mu' enclosures (used for gradient enclosures) ---

/// Shift applied before the asymptotic series; at `u >= 8` the neglected
/// term is below `3e-13`.
const SHIFT_TARGET: f64 = 8.0;

fn ratio(num: f64, den: f64) -> Interval {
    Interval::point(num).div(Interval::point(den)).expect("nonzero constant")
}

/// `sum_{k=1..5} c_k r^{2k}` in interval arithmetic with the neglected
/// term `[0, 691/32760 r^12]`; shared by ψ and mu'.
fn psi_series_tail(r: Interval) -> Interval {
    let r2 = r.sqr();
    let coeffs = [
        ratio(-1.0, 12.0),
        ratio(1.0, 120.0),
        ratio(-1.0, 252.0),
        ratio(1.0, 240.0),
        ratio(-1.0, 132.0),
    ];
    let mut acc = Interval::point(0.0);
    for c in coeffs.iter().rev() {
        acc = (acc + *c) * r2;
    }
    let rest = ratio(691.0, 32760.0) * r2.powi(6);
    acc + Interval::from_bounds_unchecked(0.0, rest.hi())
}

fn shift_count(z: f64) -> u32 {
    if z >= SHIFT_TARGET {
        0
    } else {
        libm::ceil(SHIFT_TARGET - z) as u32
    }
}

/// Enclosure of `ψ(z)` at a point `z > 0`.
pub fn digamma_enclosure(z: f64) -> Result<Interval> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain!("digamma requires z > 0, got {z}"));
    }
    let n = shift_count(z);
    let zi = Interval::point(z);
    let mut shift = Interval::point(0.0);
    for j in 0..n {
        shift = shift + (zi + j as f64).recip()?;
    }
    let u = zi + n as f64;
    let r = u.recip()?;
    let psi_u = u.ln()? - r * 0.5 + psi_series_tail(r);
    Ok(psi_u - shift)
}

/// `ψ` is increasing on `(0, ∞)`.
pub fn digamma_interval(z: Interval) -> Result<Interval> {
    if z.lo() <= 0.0 {
        return Err(domain!("digamma requires z > 0, got {z}"));
    }
    let lo = digamma_enclosure(z.lo())?;
    let hi = if z.is_point() { lo } else { digamma_enclosure(z.hi())? };
    Ok(Interval::from_bounds_unchecked(lo.lo(), hi.hi()))
}

/// Enclosure of `mu'(x)` at a point, via
/// `mu'(x) = mu'(x + 1) + ln(1 + 1/x) - (x + 1/2) / (x (x + 1))`.
pub fn mu_deriv_enclosure(x: f64) -> Result<Interval> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain!("mu' requires x > 0, got {x}"));
    }
    let n = shift_count(x);
    let xi = Interval::point(x);
    let mut acc = Interval::point(0.0);
    for j in 0..n {
        let z = xi + j as f64;
        let zr = z.recip()?;
        let term = zr.ln_1p()? - (z + 0.5).div(z * (z + 1.0))?;
        acc = acc + term;
    }
    let u = xi + n as f64;
    Ok(psi_series_tail(u.recip()?) + acc)
}

/// `mu` is convex, so `mu'` is increasing.
pub fn mu_deriv_interval(x: Interval) -> Result<Interval> {
    if x.lo() <= 0.0 {
        return Err(domain!("mu' requires x > 0, got {x}"));
    }
    let lo = mu_deriv_enclosure(x.lo())?;
    let hi = if x.is_point() { lo } else { mu_deriv_enclosure(x.hi())? };
    Ok(Interval::from_bounds_unchecked(lo.lo(), hi.hi().min(0.0).max(lo.lo())))
}
