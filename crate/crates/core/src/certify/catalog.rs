//! The sixteen inequality cases.
//!
//! Every case is written as a gap function that is nonnegative exactly when
//! the claim holds. Two evaluators exist per case:
//!
//! * an interval form, generic over [`GapScalar`], in which each
//!   `ln Γ(1 + z)` is expanded as `z ln z - z + ln(2πz)/2 + mu(z)` and the
//!   leading terms are cancelled by hand, so the large parts never meet in
//!   interval arithmetic;
//! * a point form built from the original Gamma expressions through
//!   [`log_gamma_ref`], used for counterexample detection and as an
//!   independent cross-check of the interval form.

use alloc::borrow::Cow;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI, TAU};

use super::scalar::GapScalar;
use crate::error::{domain, Result};
use crate::interval::Interval;
use crate::specfun::{log_gamma_ref, StirlingConfig};

/// Width of the neighbourhood removed around equality points and lines.
pub const EQUALITY_DELTA: f64 = 1e-6;
/// Step of the first-difference grids on continuous parameters.
pub const GRID_STEP: f64 = 0.01;
/// Smallest exponent used for the `0 < p < 1` sequence cases.
pub const P_MIN_LOW: f64 = 0.05;

/// Parameter ranges imposed on the unbounded claims.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Caps {
    pub x_max: f64,
    pub y_max: f64,
    pub n_max: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { x_max: 100.0, y_max: 100.0, n_max: 60 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum AxisKind {
    Continuous,
    /// Values `lo + i * step`, `i = 0, 1, ...`, not exceeding `hi`.
    Lattice { step: f64 },
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Axis {
    pub name: Cow<'static, str>,
    pub lo: f64,
    pub hi: f64,
    pub kind: AxisKind,
}

impl Axis {
    fn cont(name: &'static str, lo: f64, hi: f64) -> Self {
        Axis { name: Cow::Borrowed(name), lo, hi, kind: AxisKind::Continuous }
    }

    fn lattice(name: &'static str, lo: f64, hi: f64, step: f64) -> Self {
        Axis { name: Cow::Borrowed(name), lo, hi, kind: AxisKind::Lattice { step } }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.kind, AxisKind::Lattice { .. })
    }

    /// Number of lattice values (zero when `hi < lo`).
    pub fn lattice_len(&self) -> usize {
        match self.kind {
            AxisKind::Lattice { step } if self.hi >= self.lo => {
                libm::floor((self.hi - self.lo) / step + 1e-9) as usize + 1
            }
            _ => 0,
        }
    }

    pub fn lattice_value(&self, i: usize) -> f64 {
        match self.kind {
            AxisKind::Lattice { step } => self.lo + i as f64 * step,
            AxisKind::Continuous => self.lo,
        }
    }

    fn index_of(&self, v: f64) -> usize {
        match self.kind {
            AxisKind::Lattice { step } => libm::round((v - self.lo) / step) as usize,
            AxisKind::Continuous => 0,
        }
    }
}

/// One coordinate of a region: a closed interval, or an inclusive range of
/// lattice indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Range {
    Continuous(Interval),
    Lattice { first: usize, last: usize },
}

/// A product set of parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub ranges: Vec<Range>,
}

/// Both sides of a claim in log space at one point; the gap is
/// `upper - lower`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapTerms {
    pub upper: f64,
    pub lower: f64,
    /// Sum of magnitudes of the terms combined into the two sides.
    pub scale: f64,
}

impl GapTerms {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    /// Bound on the floating-point error of `gap`.
    pub fn eval_error(&self) -> f64 {
        64.0 * f64::EPSILON * (1.0 + self.scale)
    }

    /// Threshold under which a point counts as an equality case.
    pub fn equality_tolerance(&self) -> f64 {
        1e-9 * (1.0 + self.upper.abs() + self.lower.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    P11Upper16,
    P11Upper423,
    P11LowerSqrt,
    P11LowerE2,
    TwoVariable,
    GMonotoneX,
    GMonotoneY,
    FourGamma,
    FourGammaMain,
    FourGammaMu,
    HyperplaneCore,
    EllipsoidRatio,
    EllipsoidAux,
    EuclideanRatio,
    PSumCore,
    LowPSequence,
}

/// One claim: its gap evaluators, the parameter domain, the regions that
/// are certified with strict positivity, and the equality points.
#[derive(Clone, Debug)]
pub struct InequalityCase {
    pub id: &'static str,
    /// The claim in plain notation.
    pub statement: &'static str,
    pub kind: CaseKind,
    pub axes: Vec<Axis>,
    pub regions: Vec<Region>,
    pub equalities: Vec<Region>,
}

pub const CASE_IDS: [&str; 16] = [
    "P1.1-1",
    "P1.1-2",
    "P1.1-3",
    "P1.1-4",
    "P1.2",
    "P1.3-1",
    "P1.3-2",
    "P1.4",
    "P1.4-a",
    "P1.4-b",
    "P2.1-core",
    "P2.2/Eq.(5)",
    "P2.2-aux",
    "R1/Eq.(7)",
    "P2.4-core",
    "P2.5-const",
];

// --- rigorous constants ---

fn ln_of(n: f64) -> Interval {
    Interval::point(n).ln().expect("positive constant")
}
fn c_ln2() -> Interval {
    Interval::enclose(LN_2)
}
fn c_pi() -> Interval {
    Interval::enclose(PI)
}
fn c_2pi() -> Interval {
    Interval::enclose(TAU)
}
fn c_ln_pi() -> Interval {
    c_pi().ln().expect("positive constant")
}
/// `ln Γ(3/2) = ln(pi)/2 - ln 2`.
fn c_lgamma_three_halves() -> Interval {
    c_ln_pi() * 0.5 - c_ln2()
}

fn cst<T: GapScalar>(v: Interval) -> T {
    T::cst(v)
}

// --- interval gap forms ---

/// `(2/x) ln Γ(1+x) - 2 ln x + 2 = ln(2πx)/x + 2 mu(x)/x`.
fn two_over_x_tail<T: GapScalar>(x: T, cfg: &StirlingConfig) -> Result<T> {
    ((cst::<T>(c_2pi()) * x).ln()? + x.mu(cfg)? * 2.0).div(x)
}

fn ln1p_ratio<T: GapScalar>(a: f64, x: T) -> Result<T> {
    (x.recip()? * a).ln_1p()
}

fn two_variable<T: GapScalar>(x: T, y: T, cfg: &StirlingConfig) -> Result<T> {
    let ln3 = cst::<T>(ln_of(3.0));
    let yr = y.recip()?;
    let l2y = (yr * 2.0).ln_1p()?;
    let lead = x * ((y + 2.0) * l2y - ln3 * 3.0);
    let two_pi_x = cst::<T>(c_2pi()) * x;
    let logs = two_pi_x.ln()? - ln3 * 0.5 + l2y * 0.5 - (two_pi_x * y).ln()? * yr;
    let mus = x.mu(cfg)? * 3.0 - (x * 3.0).mu(cfg)? - (yr * 2.0 + 1.0) * (x * y).mu(cfg)?
        + ((y + 2.0) * x).mu(cfg)?;
    Ok(lead + logs + mus)
}

fn g_monotone_x<T: GapScalar>(x: T, y: T, cfg: &StirlingConfig) -> Result<T> {
    let xh = x + GRID_STEP;
    let yr = y.recip()?;
    let lead = (cst::<T>(Interval::point(1.0)) - yr) * 0.5 * (x.recip()? * GRID_STEP).ln_1p()?;
    let inner = ((x * y).mu(cfg)? - (xh * y).mu(cfg)?) * yr;
    Ok(lead + inner - (x.mu(cfg)? - xh.mu(cfg)?))
}

fn g_monotone_y<T: GapScalar>(x: T, y: T, cfg: &StirlingConfig) -> Result<T> {
    let sign = if x.value().lo() >= 1.0 {
        1.0
    } else if x.value().hi() <= 1.0 {
        -1.0
    } else {
        return Err(domain!("monotonicity in y changes direction inside {}", x.value()));
    };
    let yh = y + GRID_STEP;
    let lead = x.ln()? * GRID_STEP * 0.5 * (y * yh).recip()?;
    let first = ((x * y).mu(cfg)? - y.mu(cfg)?).div(y)?;
    let second = ((x * yh).mu(cfg)? - yh.mu(cfg)?).div(yh)?;
    Ok((lead + first - second) * sign)
}

/// `(x + 1/2) ln(x/(x - 1/2)) - ln(2)/2 - ln(π(2x-1))/(4x-2)`.
fn four_gamma_main<T: GapScalar>(x: T) -> Result<T> {
    let t = x * 2.0 - 1.0;
    let tr = t.recip()?;
    Ok((x + 0.5) * tr.ln_1p()? - cst::<T>(c_ln2()) * 0.5 - (cst::<T>(c_pi()) * t).ln()? * tr * 0.5)
}

/// `2 mu(x) + (2x/(2x-1)) mu(x - 1/2) - mu(2x) - 2 mu(x/2)`, claimed `<= 0`.
fn four_gamma_mu<T: GapScalar>(x: T, cfg: &StirlingConfig) -> Result<T> {
    let t = x * 2.0 - 1.0;
    let coef = t.recip()? + 1.0;
    Ok(x.mu(cfg)? * 2.0 + coef * (x - 0.5).mu(cfg)? - (x * 2.0).mu(cfg)? - (x * 0.5).mu(cfg)? * 2.0)
}

fn four_gamma<T: GapScalar>(x: T, cfg: &StirlingConfig) -> Result<T> {
    Ok(four_gamma_main(x)? - four_gamma_mu(x, cfg)?)
}

fn ellipsoid_ratio<T: GapScalar>(p: T, n: T, k: T, cfg: &StirlingConfig) -> Result<T> {
    let q = p.recip()?;
    let nr = n.recip()?;
    let kr = k.recip()?;
    let ln_n = n.ln()?;
    let left = (nr * 0.5 - 0.5) * (cst::<T>(c_2pi()) * q).ln()? + ln_n * nr * 0.5 + (n * q).mu(cfg)? * nr
        - q.mu(cfg)?;
    let half_k = k * 0.5;
    let right = half_k.ln()? * 0.5 - 0.5 + (cst::<T>(c_pi()) * k).ln()? * kr * 0.5 + half_k.mu(cfg)? * kr;
    Ok(left - right + ln_n * 0.5 + cst::<T>(c_lgamma_three_halves()))
}

fn ellipsoid_aux<T: GapScalar>(n: T, cfg: &StirlingConfig) -> Result<T> {
    let nr = n.recip()?;
    let c = ln_of(4.0) - ln_of(23.0) - c_ln_pi() * 2.0;
    Ok((cst::<T>(c_2pi()) * n).ln()? * nr * 2.0 + n.mu(cfg)? * nr * 4.0 - 4.0 - cst::<T>(c)
        - ln1p_ratio(3.0, n)?
        - ln1p_ratio(7.0, n)?)
}

fn euclidean_ratio<T: GapScalar>(n: T, cfg: &StirlingConfig) -> Result<T> {
    let nr = n.recip()?;
    let ln2 = cst::<T>(c_ln2());
    Ok(cst::<T>(Interval::point(0.5)) - ln2 * 0.5 - ln2 * nr * 0.5 + ((n * 0.5).mu(cfg)? - n.mu(cfg)?) * nr
        - cst::<T>(c_lgamma_three_halves()))
}

/// Component 0: `ln a_n - ln a_{n+1}`; component 1: `ln a_n - ln a_∞`.
fn low_p_sequence<T: GapScalar>(p: T, n: T, comp: usize, cfg: &StirlingConfig) -> Result<T> {
    let q = p.recip()?;
    let ln_q = -p.ln()?;
    let nr = n.recip()?;
    let head = ((n * q).mu(cfg)? - n.mu(cfg)?) * nr;
    if comp == 1 {
        return Ok(ln_q * nr * 0.5 + head);
    }
    let n1 = n + 1.0;
    let n1r = n1.recip()?;
    let tail = ((n1 * q).mu(cfg)? - n1.mu(cfg)?) * n1r;
    Ok(ln_q * (nr * n1r * 0.5) + head - tail)
}

impl CaseKind {
    pub fn components(&self) -> usize {
        match self {
            CaseKind::LowPSequence => 2,
            _ => 1,
        }
    }

    /// Interval (or jet) evaluation of component `comp` of the gap.
    pub fn eval<T: GapScalar>(&self, a: &[T], comp: usize, cfg: &StirlingConfig) -> Result<T> {
        let one = || cst::<T>(Interval::point(1.0));
        match self {
            CaseKind::P11Upper16 => {
                let x = a[0];
                Ok(ln1p_ratio(1.0, x)? + ln1p_ratio(2.0, x)? + 2.0 - cst::<T>(ln_of(6.0)) - two_over_x_tail(x, cfg)?)
            }
            CaseKind::P11Upper423 => {
                let x = a[0];
                let c = ln_of(4.0) - ln_of(23.0);
                Ok(cst::<T>(c) + ln1p_ratio(1.0, x)? + ln1p_ratio(2.0, x)? + 2.0 - two_over_x_tail(x, cfg)?)
            }
            CaseKind::P11LowerSqrt => {
                let x = a[0];
                let c = c_ln2() - c_ln_pi() - ln_of(23.0) * 0.5;
                Ok(two_over_x_tail(x, cfg)? - 2.0 - (ln1p_ratio(3.0, x)? + ln1p_ratio(7.0, x)?) * 0.5 - cst::<T>(c))
            }
            CaseKind::P11LowerE2 => {
                let x = a[0];
                Ok(two_over_x_tail(x, cfg)? - ln1p_ratio(1.0, x)? - ln1p_ratio(2.0, x)?)
            }
            CaseKind::TwoVariable => two_variable(a[0], a[1], cfg),
            CaseKind::GMonotoneX => g_monotone_x(a[0], a[1], cfg),
            CaseKind::GMonotoneY => g_monotone_y(a[0], a[1], cfg),
            CaseKind::FourGamma | CaseKind::PSumCore => four_gamma(a[0], cfg),
            CaseKind::FourGammaMain => four_gamma_main(a[0]),
            CaseKind::FourGammaMu => Ok(-four_gamma_mu(a[0], cfg)?),
            CaseKind::HyperplaneCore => two_variable(one().div(a[0])?, a[1], cfg),
            CaseKind::EllipsoidRatio => ellipsoid_ratio(a[0], a[1], a[2], cfg),
            CaseKind::EllipsoidAux => ellipsoid_aux(a[0], cfg),
            CaseKind::EuclideanRatio => euclidean_ratio(a[0], cfg),
            CaseKind::LowPSequence => low_p_sequence(a[0], a[1], comp, cfg),
        }
    }

    /// Point evaluation from the original Gamma expressions.
    pub fn point(&self, a: &[f64], comp: usize) -> Result<GapTerms> {
        let mut s = Sides::default();
        match self {
            CaseKind::P11Upper16 | CaseKind::P11Upper423 => {
                let x = a[0];
                let c = if *self == CaseKind::P11Upper16 { 1.0 / 6.0 } else { 4.0 / 23.0 };
                s.up(1.0, libm::log(c * (x + 1.0) * (x + 2.0)));
                s.low(2.0 / x, lg1p(x)?);
            }
            CaseKind::P11LowerSqrt => {
                let x = a[0];
                s.up(2.0 / x, lg1p(x)?);
                let c = 2.0 / (PI * libm::sqrt(23.0));
                s.low(1.0, libm::log(c * x) + 0.5 * libm::log((x + 3.0) * (x + 7.0)));
            }
            CaseKind::P11LowerE2 => {
                let x = a[0];
                s.up(2.0 / x, lg1p(x)?);
                s.low(1.0, -2.0 + libm::log((x + 1.0) * (x + 2.0)));
            }
            CaseKind::TwoVariable => two_variable_point(&mut s, a[0], a[1])?,
            CaseKind::HyperplaneCore => two_variable_point(&mut s, 1.0 / a[0], a[1])?,
            CaseKind::GMonotoneX => {
                let (x, y) = (a[0], a[1]);
                ln_g_terms(&mut s, true, x, y)?;
                ln_g_terms(&mut s, false, x + GRID_STEP, y)?;
            }
            CaseKind::GMonotoneY => {
                let (x, y) = (a[0], a[1]);
                let decreasing = x >= 1.0;
                ln_g_terms(&mut s, decreasing, x, y)?;
                ln_g_terms(&mut s, !decreasing, x, y + GRID_STEP)?;
            }
            CaseKind::FourGamma | CaseKind::PSumCore => {
                let x = a[0];
                s.up(1.0, lg1p(2.0 * x)?);
                s.up(2.0, lg1p(x / 2.0)?);
                s.low(x, LN_2);
                s.low(2.0, lg1p(x)?);
                s.low(2.0 * x / (2.0 * x - 1.0), lg1p(x - 0.5)?);
            }
            CaseKind::FourGammaMain => {
                let x = a[0];
                let t = 2.0 * x - 1.0;
                s.up(x + 0.5, libm::log1p(1.0 / t));
                s.low(0.5, LN_2);
                s.low(1.0 / (2.0 * t), libm::log(PI * t));
            }
            CaseKind::FourGammaMu => {
                let x = a[0];
                s.low(2.0, mu_point(x)?);
                s.low(2.0 * x / (2.0 * x - 1.0), mu_point(x - 0.5)?);
                s.low(-1.0, mu_point(2.0 * x)?);
                s.low(-2.0, mu_point(x / 2.0)?);
                // mu(z) = ln Γ(1+z) - (Stirling main part); the cancellation
                // is charged to the scale.
                s.scale += 3.0 * (lg1p(2.0 * x)?.abs() + 2.0 * lg1p(x)?.abs());
            }
            CaseKind::EllipsoidRatio => {
                let (p, n, k) = (a[0], a[1], a[2]);
                s.up(1.0 / n, lg1p(n / p)?);
                s.up(-1.0 / p, libm::log(n));
                s.up(-1.0, lg1p(1.0 / p)?);
                s.low(1.0 / k, lg1p(k / 2.0)?);
                s.low(-0.5, libm::log(n));
                s.low(-1.0, lg1p(0.5)?);
            }
            CaseKind::EllipsoidAux => {
                let n = a[0];
                s.up(4.0 / n, lg1p(n)?);
                let c = 4.0 / (23.0 * PI * PI);
                s.low(1.0, libm::log(c));
                s.low(2.0, libm::log(n));
                s.low(1.0, libm::log(n + 3.0));
                s.low(1.0, libm::log(n + 7.0));
            }
            CaseKind::EuclideanRatio => {
                let n = a[0];
                s.up(0.5, libm::log(n));
                s.up(1.0 / n, lg1p(n / 2.0)?);
                s.low(1.0, lg1p(0.5)?);
                s.low(1.0 / n, lg1p(n)?);
            }
            CaseKind::LowPSequence => {
                let (p, n) = (a[0], a[1]);
                ln_low_p_term(&mut s, p, n, true)?;
                if comp == 0 {
                    ln_low_p_term(&mut s, p, n + 1.0, false)?;
                } else {
                    let q = 1.0 / p;
                    s.low(1.0, 1.0 - q);
                    s.low(q, libm::log(q));
                    s.low(-1.0, lg1p(q)?);
                }
            }
        }
        Ok(s.finish())
    }
}

#[derive(Default)]
struct Sides {
    upper: f64,
    lower: f64,
    scale: f64,
}

impl Sides {
    fn up(&mut self, c: f64, t: f64) {
        self.upper += c * t;
        self.scale += (c * t).abs();
    }
    fn low(&mut self, c: f64, t: f64) {
        self.lower += c * t;
        self.scale += (c * t).abs();
    }
    fn finish(self) -> GapTerms {
        GapTerms { upper: self.upper, lower: self.lower, scale: self.scale }
    }
}

fn lg1p(z: f64) -> Result<f64> {
    log_gamma_ref(1.0 + z)
}

fn mu_point(z: f64) -> Result<f64> {
    Ok(lg1p(z)? - (z * libm::log(z) - z + 0.5 * libm::log(TAU * z)))
}

fn two_variable_point(s: &mut Sides, x: f64, y: f64) -> Result<()> {
    s.up(3.0, lg1p(x)?);
    s.up(-1.0, lg1p(3.0 * x)?);
    s.low(1.0 + 2.0 / y, lg1p(x * y)?);
    s.low(-1.0, lg1p((y + 2.0) * x)?);
    Ok(())
}

/// `ln a_n` with `a_n = n^{1-1/p} Γ(1+n/p)^{1/n} / ((n!)^{1/n} Γ(1+1/p))`.
fn ln_low_p_term(s: &mut Sides, p: f64, n: f64, upper: bool) -> Result<()> {
    let terms = [
        (1.0 - 1.0 / p, libm::log(n)),
        (1.0 / n, lg1p(n / p)?),
        (-1.0 / n, lg1p(n)?),
        (-1.0, lg1p(1.0 / p)?),
    ];
    for (c, t) in terms {
        if upper {
            s.up(c, t);
        } else {
            s.low(c, t);
        }
    }
    Ok(())
}

/// `ln g(x, y)`.
fn ln_g(x: f64, y: f64) -> Result<f64> {
    Ok(libm::log(y) - lg1p(y)? / y + lg1p(x * y)? / y - x * libm::log(y) - lg1p(x)?)
}

/// Adds the terms of `ln g(x, y)` to one side, so that their magnitudes
/// enter the scale.
fn ln_g_terms(s: &mut Sides, upper: bool, x: f64, y: f64) -> Result<()> {
    let ly = libm::log(y);
    let terms = [(1.0, ly), (-1.0 / y, lg1p(y)?), (1.0 / y, lg1p(x * y)?), (-x, ly), (-1.0, lg1p(x)?)];
    for (c, t) in terms {
        if upper {
            s.up(c, t)
        } else {
            s.low(c, t)
        }
    }
    Ok(())
}

/// `g(x, y) = (y / Γ(1+y)^{1/y}) Γ(1+xy)^{1/y} / (y^x Γ(1+x))`.
pub fn g_func(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(domain!("g requires x, y > 0, got ({x}, {y})"));
    }
    let l = ln_g(x, y)?;
    if !(l.abs() <= 700.0) {
        return Err(crate::error::range!("ln g = {l} out of range"));
    }
    Ok(libm::exp(l))
}

// --- catalog ---

fn cont(lo: f64, hi: f64) -> Range {
    Range::Continuous(Interval::new(lo, hi).expect("valid region"))
}

fn all(axis: &Axis) -> Range {
    match axis.kind {
        AxisKind::Continuous => cont(axis.lo, axis.hi),
        AxisKind::Lattice { .. } => Range::Lattice { first: 0, last: axis.lattice_len().saturating_sub(1) },
    }
}

fn lat(axis: &Axis, from: f64, to: f64) -> Range {
    Range::Lattice { first: axis.index_of(from), last: axis.index_of(to) }
}

fn region(ranges: Vec<Range>) -> Region {
    Region { ranges }
}

/// The catalog under the given caps. Cases whose domain is empty under the
/// caps keep their id but have no regions; see [`InequalityCase::is_empty`].
pub fn catalog_with(caps: &Caps) -> Vec<InequalityCase> {
    let d = EQUALITY_DELTA;
    let (xm, ym, nm) = (caps.x_max, caps.y_max, caps.n_max as f64);
    let mut out = Vec::with_capacity(16);

    let one_dim = |id, statement, kind, lo: f64, hi: f64| {
        let ax = Axis::cont("x", lo, hi);
        let regions = if hi >= lo { vec![region(vec![cont(lo, hi)])] } else { vec![] };
        InequalityCase { id, statement, kind, axes: vec![ax], regions, equalities: vec![] }
    };

    let mut p111 = one_dim("P1.1-1", "Γ(1+x)^(2/x) <= (x+1)(x+2)/6, x >= 2", CaseKind::P11Upper16, 2.0, xm);
    if xm >= 2.0 + d {
        p111.regions = vec![region(vec![cont(2.0 + d, xm)])];
    } else {
        p111.regions.clear();
    }
    if xm >= 2.0 {
        p111.equalities = vec![region(vec![cont(2.0, 2.0)])];
    }
    out.push(p111);
    out.push(one_dim("P1.1-2", "Γ(1+x)^(2/x) <= (4/23)(x+1)(x+2), 1 <= x <= 2", CaseKind::P11Upper423, 1.0, 2.0));
    out.push(one_dim(
        "P1.1-3",
        "Γ(1+x)^(2/x) >= (2/(π sqrt 23)) x sqrt((x+3)(x+7)), x >= 5",
        CaseKind::P11LowerSqrt,
        5.0,
        xm,
    ));
    out.push(one_dim("P1.1-4", "Γ(1+x)^(2/x) >= e^-2 (x+1)(x+2), x >= 1", CaseKind::P11LowerE2, 1.0, xm));

    {
        let axes = vec![Axis::cont("x", 0.5, 1.0), Axis::cont("y", 2.0, ym)];
        let (regions, equalities) = if ym >= 2.0 + d {
            (
                vec![region(vec![cont(0.5, 1.0 - d), cont(2.0, ym)]), region(vec![cont(1.0 - d, 1.0), cont(2.0 + d, ym)])],
                vec![region(vec![cont(1.0, 1.0), cont(2.0, 2.0)])],
            )
        } else {
            (vec![], vec![])
        };
        out.push(InequalityCase {
            id: "P1.2",
            statement: "Γ(1+xy)^(1+2/y) / Γ(1+(y+2)x) <= Γ(1+x)^3 / Γ(1+3x), 1/2 <= x <= 1, y >= 2",
            kind: CaseKind::TwoVariable,
            axes,
            regions,
            equalities,
        });
    }
    {
        let ax = Axis::lattice("x", 0.5, xm - GRID_STEP, GRID_STEP);
        let ay = Axis::cont("y", 2.0, ym);
        let regions = if ax.lattice_len() > 0 && ym >= 2.0 { vec![region(vec![all(&ax), all(&ay)])] } else { vec![] };
        out.push(InequalityCase {
            id: "P1.3-1",
            statement: "g(x, y) >= g(x + 0.01, y) on the grid x = 1/2, 0.51, ..., y >= 2",
            kind: CaseKind::GMonotoneX,
            axes: vec![ax, ay],
            regions,
            equalities: vec![],
        });
    }
    {
        let ax = Axis::cont("x", 0.5, xm);
        let ay = Axis::lattice("y", 2.0, ym - GRID_STEP, GRID_STEP);
        let mut regions = vec![];
        let mut equalities = vec![];
        if ay.lattice_len() > 0 {
            regions.push(region(vec![cont(0.5, 1.0 - d), all(&ay)]));
            if xm >= 1.0 + d {
                regions.push(region(vec![cont(1.0 + d, xm), all(&ay)]));
            }
            if xm >= 1.0 {
                equalities.push(region(vec![cont(1.0, 1.0), all(&ay)]));
            }
        }
        out.push(InequalityCase {
            id: "P1.3-2",
            statement: "g(x, y) >= g(x, y + 0.01) for x >= 1 and <= for 1/2 <= x <= 1, y = 2, 2.01, ...",
            kind: CaseKind::GMonotoneY,
            axes: vec![ax, ay],
            regions,
            equalities,
        });
    }
    out.push(one_dim(
        "P1.4",
        "Γ(1+2x) Γ(1+x/2)^2 >= 2^x Γ(1+x)^2 Γ(1+(2x-1)/2)^(2x/(2x-1)), x >= 5/2",
        CaseKind::FourGamma,
        2.5,
        xm,
    ));
    out.push(one_dim(
        "P1.4-a",
        "(x/(x-1/2))^(x+1/2) >= sqrt 2 ((2x-1)π)^(1/(4x-2)), x >= 5/2",
        CaseKind::FourGammaMain,
        2.5,
        xm,
    ));
    out.push(one_dim(
        "P1.4-b",
        "2 mu(x) + (2x/(2x-1)) mu((2x-1)/2) - mu(2x) - 2 mu(x/2) <= 0, x >= 5/2",
        CaseKind::FourGammaMu,
        2.5,
        xm,
    ));
    {
        let ap = Axis::cont("p", 1.0, 2.0);
        let an = Axis::lattice("n", 2.0, nm, 1.0);
        let mut regions = vec![];
        let mut equalities = vec![];
        if an.lattice_len() > 0 {
            regions.push(region(vec![cont(1.0 + d, 2.0), lat(&an, 2.0, 2.0)]));
            if nm >= 3.0 {
                regions.push(region(vec![cont(1.0, 2.0), lat(&an, 3.0, nm)]));
            }
            equalities.push(region(vec![cont(1.0, 1.0), lat(&an, 2.0, 2.0)]));
        }
        out.push(InequalityCase {
            id: "P2.1-core",
            statement: "Γ(1+3/p) Γ(1+n/p)^(1+2/n) <= Γ(1+(n+2)/p) Γ(1+1/p)^3, 1 <= p <= 2, n >= 2",
            kind: CaseKind::HyperplaneCore,
            axes: vec![ap, an],
            regions,
            equalities,
        });
    }
    {
        let ap = Axis::cont("p", 1.0, 2.0);
        let an = Axis::lattice("n", 5.0, nm, 1.0);
        let ak = Axis::lattice("k", 1.0, libm::floor((nm - 1.0) / 2.0), 1.0);
        let regions =
            if an.lattice_len() > 0 { vec![region(vec![all(&ap), all(&an), all(&ak)])] } else { vec![] };
        out.push(InequalityCase {
            id: "P2.2/Eq.(5)",
            statement: "Γ(n/p+1)^(1/n) / (n^(1/p) Γ(1/p+1)) >= Γ(k/2+1)^(1/k) / (n^(1/2) Γ(3/2)), 1 <= p <= 2, 1 <= k <= (n-1)/2",
            kind: CaseKind::EllipsoidRatio,
            axes: vec![ap, an, ak],
            regions,
            equalities: vec![],
        });
    }
    {
        let an = Axis::lattice("n", 5.0, nm, 1.0);
        let regions = if an.lattice_len() > 0 { vec![region(vec![all(&an)])] } else { vec![] };
        out.push(InequalityCase {
            id: "P2.2-aux",
            statement: "Γ(1+n)^(4/n) >= (4/(23 π^2)) n^2 (n+3)(n+7), n >= 5",
            kind: CaseKind::EllipsoidAux,
            axes: vec![an],
            regions,
            equalities: vec![],
        });
    }
    {
        let an = Axis::lattice("n", 1.0, nm, 1.0);
        let mut regions = vec![];
        let mut equalities = vec![];
        if an.lattice_len() > 0 {
            equalities.push(region(vec![lat(&an, 1.0, 1.0)]));
            if nm >= 2.0 {
                regions.push(region(vec![lat(&an, 2.0, nm)]));
            }
        }
        out.push(InequalityCase {
            id: "R1/Eq.(7)",
            statement: "n^(1/2) Γ(1+n/2)^(1/n) >= Γ(3/2) Γ(n+1)^(1/n), n >= 1",
            kind: CaseKind::EuclideanRatio,
            axes: vec![an],
            regions,
            equalities,
        });
    }
    {
        let an = Axis::lattice("n", 2.0, nm, 1.0);
        let regions = if an.lattice_len() > 0 { vec![region(vec![all(&an)])] } else { vec![] };
        out.push(InequalityCase {
            id: "P2.4-core",
            statement: "Γ(1+2n) Γ(1+n/2)^2 >= 2^n Γ(1+n)^2 Γ(1+(2n-1)/2)^(2n/(2n-1)), n >= 2",
            kind: CaseKind::PSumCore,
            axes: vec![an],
            regions,
            equalities: vec![],
        });
    }
    {
        let ap = Axis::cont("p", P_MIN_LOW, 1.0);
        let an = Axis::lattice("n", 1.0, nm, 1.0);
        let mut regions = vec![];
        let mut equalities = vec![];
        if an.lattice_len() > 0 {
            regions.push(region(vec![cont(P_MIN_LOW, 1.0 - d), all(&an)]));
            equalities.push(region(vec![cont(1.0, 1.0), all(&an)]));
        }
        out.push(InequalityCase {
            id: "P2.5-const",
            statement: "a_n(p) = n^(1-1/p) Γ(1+n/p)^(1/n) / ((n!)^(1/n) Γ(1+1/p)) satisfies a_n >= a_(n+1) and a_n >= e^(1-1/p) / (Γ(1+1/p) p^(1/p)), 0 < p <= 1",
            kind: CaseKind::LowPSequence,
            axes: vec![ap, an],
            regions,
            equalities,
        });
    }
    out.sort_by(|a, b| a.id.cmp(b.id));
    out
}

/// The catalog under the default caps.
pub fn catalog() -> Vec<InequalityCase> {
    catalog_with(&Caps::default())
}

impl InequalityCase {
    /// True when the caps leave nothing to certify or check.
    pub fn is_empty(&self) -> bool {
        self.regions.is_empty() && self.equalities.is_empty()
    }

    /// Indices of continuous axes (the variables of the jets).
    pub fn continuous_axes(&self) -> Vec<usize> {
        self.axes.iter().enumerate().filter(|(_, a)| !a.is_lattice()).map(|(i, _)| i).collect()
    }

    /// Constraints among lattice values beyond the axis ranges.
    pub fn admissible(&self, point: &[f64]) -> bool {
        match self.kind {
            CaseKind::EllipsoidRatio => 2.0 * point[2] <= point[1] - 1.0,
            _ => true,
        }
    }

    /// Lattice index ranges of a region, as values.
    pub fn lattice_values(&self, axis: usize, r: &Range) -> Vec<f64> {
        match r {
            Range::Lattice { first, last } => (*first..=*last).map(|i| self.axes[axis].lattice_value(i)).collect(),
            Range::Continuous(_) => Vec::new(),
        }
    }

    pub fn eval<T: GapScalar>(&self, args: &[T], comp: usize, cfg: &StirlingConfig) -> Result<T> {
        self.kind.eval(args, comp, cfg)
    }

    pub fn point(&self, args: &[f64], comp: usize) -> Result<GapTerms> {
        self.kind.point(args, comp)
    }

    pub fn components(&self) -> usize {
        self.kind.components()
    }

    /// Smallest gap over components at a point, with the largest error.
    pub fn point_min(&self, args: &[f64]) -> Result<(f64, GapTerms)> {
        let mut best: Option<(f64, GapTerms)> = None;
        for c in 0..self.components() {
            let t = self.point(args, c)?;
            if best.map_or(true, |(g, _)| t.gap() < g) {
                best = Some((t.gap(), t));
            }
        }
        Ok(best.expect("at least one component"))
    }
}
