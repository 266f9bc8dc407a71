//! Certification of the inequality catalog on compact parameter boxes.
//!
//! A case is split into *cells*: one box per combination of lattice values
//! inside each certification region. Each cell is bisected depth first on
//! its widest continuous axis until every leaf has a strictly positive
//! interval lower bound, a point evaluation exposes a negative gap, or the
//! depth limit is hit. Cells are independent; [`verify_all`] runs them in
//! order, and parallel drivers may run [`run_cell`] in any order and then
//! hand the outcomes to [`assemble`] in cell order.

pub mod catalog;
pub mod scalar;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

pub use catalog::{catalog, catalog_with, g_func, Axis, AxisKind, Caps, GapTerms, InequalityCase, Range, Region, CASE_IDS};
pub use scalar::{GapScalar, Jet};

use crate::error::{invalid, Result};
use crate::interval::Interval;
use crate::specfun::StirlingConfig;

/// Engine parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub caps: Caps,
    /// Maximal number of bisections from a cell to a leaf.
    pub depth_limit: u32,
    /// Points per axis of the falsification scan over unresolved boxes.
    pub grid_fallback: u32,
    /// Box budget per cell.
    pub max_boxes: u64,
    /// Adds `ln(1 + mutation)` to every gap; negative values make each
    /// claim stricter. Zero for genuine runs.
    pub mutation: f64,
    pub stirling: StirlingConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            caps: Caps::default(),
            depth_limit: 40,
            grid_fallback: 2048,
            max_boxes: 1 << 20,
            mutation: 0.0,
            stirling: StirlingConfig::default(),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        let c = &self.caps;
        if !(c.x_max > 0.0 && c.x_max.is_finite() && c.y_max > 0.0 && c.y_max.is_finite()) {
            return Err(invalid!("caps must be positive and finite, got x_max = {}, y_max = {}", c.x_max, c.y_max));
        }
        if c.n_max < 1 {
            return Err(invalid!("n_max must be at least 1"));
        }
        if self.depth_limit < 1 {
            return Err(invalid!("depth_limit must be at least 1"));
        }
        if !(self.mutation > -1.0 && self.mutation.is_finite()) {
            return Err(invalid!("mutation must exceed -1, got {}", self.mutation));
        }
        Ok(())
    }

    fn shift(&self) -> Interval {
        Interval::point(self.mutation).ln_1p().expect("validated")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum Status {
    Certified,
    Counterexample,
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Certified => "CERTIFIED",
            Status::Counterexample => "COUNTEREXAMPLE",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// A parameter point with a negative gap.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    pub point: Vec<f64>,
    pub gap: f64,
    pub eval_error: f64,
}

/// Outcome of the checks on one equality set.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EqualityCheck {
    pub points: u64,
    /// Point with the largest `|gap|`.
    pub worst: Vec<f64>,
    pub max_abs_gap: f64,
    /// `|gap| <= tolerance` at every point.
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Stats {
    pub cells: u64,
    pub boxes: u64,
    pub max_depth: u32,
    /// Wall time, set by drivers that measure it; never serialized so that
    /// reports stay reproducible.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub elapsed: Option<core::time::Duration>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Certificate {
    pub case_id: String,
    pub statement: String,
    pub status: Status,
    /// The parameter domain after truncation to the caps.
    pub domain: Vec<Axis>,
    pub witness: Option<Witness>,
    /// Unresolved boxes, up to [`MAX_REPORTED_BOXES`].
    pub unresolved: Vec<Vec<Interval>>,
    pub unresolved_total: u64,
    pub equalities: Vec<EqualityCheck>,
    pub notes: Vec<String>,
    pub stats: Stats,
}

pub const MAX_REPORTED_BOXES: usize = 64;
/// Cap on the points of one fallback scan.
pub const MAX_GRID_POINTS: u64 = 1 << 16;
/// Cap on the number of unresolved boxes scanned per cell.
pub const MAX_SCANNED_BOXES: usize = 8;

/// A box with every lattice coordinate fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub bounds: Vec<Interval>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellOutcome {
    pub boxes: u64,
    pub max_depth: u32,
    pub witness: Option<Witness>,
    pub unresolved: Vec<Vec<Interval>>,
    pub unresolved_total: u64,
    pub note: Option<String>,
}

/// Cells of all regions in a fixed order.
pub fn cells(case: &InequalityCase) -> Vec<Cell> {
    let mut out = Vec::new();
    for region in &case.regions {
        expand(case, region, &mut out);
    }
    out
}

fn expand(case: &InequalityCase, region: &Region, out: &mut Vec<Cell>) {
    let choices: Vec<Vec<Interval>> = region
        .ranges
        .iter()
        .enumerate()
        .map(|(i, r)| match r {
            Range::Continuous(iv) => vec![*iv],
            Range::Lattice { .. } => case.lattice_values(i, r).into_iter().map(Interval::point).collect(),
        })
        .collect();
    if choices.iter().any(|c| c.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; choices.len()];
    loop {
        let bounds: Vec<Interval> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        let lattice_point: Vec<f64> = bounds.iter().map(|b| b.lo()).collect();
        if case.admissible(&lattice_point) {
            out.push(Cell { bounds });
        }
        // Odometer with the last axis fastest.
        let mut k = choices.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Rigorous lower bound of component `comp` (shift included) on a box.
///
/// The natural interval extension is intersected with a refinement from
/// the gradient enclosure: axes on which the gap is monotone are pinned to
/// their minimizing endpoint, the remaining axes use the mean-value form.
pub fn lower_bound(case: &InequalityCase, comp: usize, b: &[Interval], cfg: &VerifyConfig) -> Result<f64> {
    let sc = &cfg.stirling;
    let shift = cfg.shift().lo();
    let natural = case.eval::<Interval>(b, comp, sc);
    if let Ok(v) = natural {
        if v.lo() + shift > 0.0 {
            return Ok(v.lo() + shift);
        }
    }
    let vars = case.continuous_axes();
    if vars.iter().all(|&i| b[i].is_point()) {
        return natural.map(|v| v.lo() + shift);
    }
    let jets: Vec<Jet> = b
        .iter()
        .enumerate()
        .map(|(i, iv)| match vars.iter().position(|&v| v == i) {
            Some(j) if !iv.is_point() => Jet::var(*iv, j),
            _ => Jet::cst(*iv),
        })
        .collect();
    let fj = case.eval::<Jet>(&jets, comp, sc)?;
    let mut centre: Vec<Interval> = b.to_vec();
    let mut open = Vec::new();
    for (j, &i) in vars.iter().enumerate() {
        if b[i].is_point() {
            continue;
        }
        let d = fj.d[j];
        if d.lo() >= 0.0 {
            centre[i] = Interval::point(b[i].lo());
        } else if d.hi() <= 0.0 {
            centre[i] = Interval::point(b[i].hi());
        } else {
            centre[i] = Interval::point(b[i].mid());
            open.push((j, i));
        }
    }
    let mut mv = case.eval::<Interval>(&centre, comp, sc)?;
    for (j, i) in open {
        mv = mv + fj.d[j] * (b[i] - centre[i]);
    }
    let best = fj.v.lo().max(mv.lo());
    Ok(best + shift)
}

fn corners(case: &InequalityCase, b: &[Interval]) -> Vec<Vec<f64>> {
    let mid: Vec<f64> = b.iter().map(|i| i.mid()).collect();
    let mut pts = vec![mid];
    let vars: Vec<usize> = case.continuous_axes().into_iter().filter(|&i| !b[i].is_point()).collect();
    for mask in 0..(1u32 << vars.len()) {
        let mut p: Vec<f64> = b.iter().map(|i| i.lo()).collect();
        for (bit, &i) in vars.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                p[i] = b[i].hi();
            }
        }
        pts.push(p);
    }
    pts
}

/// A point whose gap is negative beyond ten evaluation errors.
fn probe(case: &InequalityCase, pt: &[f64], comps: u8, cfg: &VerifyConfig) -> Option<Witness> {
    let shift = libm::log1p(cfg.mutation);
    for c in 0..case.components() {
        if comps & (1 << c) == 0 {
            continue;
        }
        if let Ok(t) = case.point(pt, c) {
            let g = t.gap() + shift;
            let e = t.eval_error();
            if g < -10.0 * e {
                return Some(Witness { point: pt.to_vec(), gap: g, eval_error: e });
            }
        }
    }
    None
}

fn widest_axis(case: &InequalityCase, b: &[Interval]) -> Option<usize> {
    case.continuous_axes()
        .into_iter()
        .filter(|&i| b[i].width() > 0.0 && b[i].mid() > b[i].lo() && b[i].mid() < b[i].hi())
        .max_by(|&i, &j| b[i].width().total_cmp(&b[j].width()).then(j.cmp(&i)))
}

/// Bisection on one cell.
pub fn run_cell(case: &InequalityCase, cell: &Cell, cfg: &VerifyConfig) -> CellOutcome {
    let all_comps: u8 = ((1u32 << case.components()) - 1) as u8;
    let mut out = CellOutcome::default();
    let mut stack: Vec<(Vec<Interval>, u32, u8)> = vec![(cell.bounds.clone(), 0, all_comps)];
    while let Some((b, depth, mut comps)) = stack.pop() {
        if out.boxes >= cfg.max_boxes {
            out.note.get_or_insert_with(|| "box budget exhausted".to_string());
            push_unresolved(&mut out, b);
            continue;
        }
        out.boxes += 1;
        out.max_depth = out.max_depth.max(depth);
        for c in 0..case.components() {
            if comps & (1 << c) == 0 {
                continue;
            }
            match lower_bound(case, c, &b, cfg) {
                Ok(lb) if lb > 0.0 => comps &= !(1 << c),
                Ok(_) => {}
                Err(e) => {
                    out.note.get_or_insert_with(|| e.to_string());
                }
            }
        }
        if comps == 0 {
            continue;
        }
        for pt in corners(case, &b) {
            if let Some(w) = probe(case, &pt, comps, cfg) {
                out.witness = Some(w);
                return out;
            }
        }
        match widest_axis(case, &b) {
            Some(axis) if depth < cfg.depth_limit => {
                let (l, r) = b[axis].bisect();
                let mut right = b.clone();
                right[axis] = r;
                let mut left = b;
                left[axis] = l;
                stack.push((right, depth + 1, comps));
                stack.push((left, depth + 1, comps));
            }
            _ => push_unresolved(&mut out, b),
        }
    }
    if out.unresolved_total > 0 {
        let boxes: Vec<Vec<Interval>> = out.unresolved.iter().take(MAX_SCANNED_BOXES).cloned().collect();
        for b in boxes {
            if let Some(w) = grid_scan(case, &b, cfg) {
                out.witness = Some(w);
                break;
            }
        }
    }
    out
}

fn push_unresolved(out: &mut CellOutcome, b: Vec<Interval>) {
    out.unresolved_total += 1;
    if out.unresolved.len() < MAX_REPORTED_BOXES {
        out.unresolved.push(b);
    }
}

/// Dense scan of a box; can only find counterexamples.
fn grid_scan(case: &InequalityCase, b: &[Interval], cfg: &VerifyConfig) -> Option<Witness> {
    let vars: Vec<usize> = case.continuous_axes().into_iter().filter(|&i| !b[i].is_point()).collect();
    let all_comps: u8 = ((1u32 << case.components()) - 1) as u8;
    if vars.is_empty() {
        let pt: Vec<f64> = b.iter().map(|i| i.lo()).collect();
        return probe(case, &pt, all_comps, cfg);
    }
    let mut per_axis = cfg.grid_fallback.max(2) as u64;
    while per_axis.pow(vars.len() as u32) > MAX_GRID_POINTS {
        per_axis /= 2;
    }
    let per_axis = per_axis.max(2);
    let total = per_axis.pow(vars.len() as u32);
    let mut pt: Vec<f64> = b.iter().map(|i| i.lo()).collect();
    for idx in 0..total {
        let mut rest = idx;
        for &i in &vars {
            let k = rest % per_axis;
            rest /= per_axis;
            let t = k as f64 / (per_axis - 1) as f64;
            pt[i] = (b[i].lo() + t * b[i].width()).min(b[i].hi());
        }
        if let Some(w) = probe(case, &pt, all_comps, cfg) {
            return Some(w);
        }
    }
    None
}

/// Equality points of a case, each checked against the equality tolerance.
pub fn check_equalities(case: &InequalityCase, cfg: &VerifyConfig) -> (Vec<EqualityCheck>, Option<Witness>) {
    let shift = libm::log1p(cfg.mutation);
    let mut checks = Vec::new();
    let mut witness = None;
    for region in &case.equalities {
        let mut cells = Vec::new();
        expand(case, region, &mut cells);
        let mut check = EqualityCheck { points: 0, worst: Vec::new(), max_abs_gap: 0.0, holds: true };
        for cell in cells {
            let pt: Vec<f64> = cell.bounds.iter().map(|i| i.lo()).collect();
            check.points += 1;
            for c in 0..case.components() {
                match case.point(&pt, c) {
                    Ok(t) => {
                        let g = t.gap() + shift;
                        if g.abs() >= check.max_abs_gap {
                            check.max_abs_gap = g.abs();
                            check.worst = pt.clone();
                        }
                        if g.abs() > t.equality_tolerance() {
                            check.holds = false;
                        }
                        if g < -t.equality_tolerance() && witness.is_none() {
                            witness = Some(Witness { point: pt.clone(), gap: g, eval_error: t.eval_error() });
                        }
                    }
                    Err(_) => check.holds = false,
                }
            }
        }
        checks.push(check);
    }
    (checks, witness)
}

/// The witness with the smaller gap; the first on ties.
fn lower_witness(a: Option<Witness>, b: Option<Witness>) -> Option<Witness> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.gap < a.gap { b } else { a }),
        (a, b) => a.or(b),
    }
}

/// Combines cell outcomes (in [`cells`] order) and equality checks. The
/// reported witness is the one with the most negative gap.
pub fn assemble(
    case: &InequalityCase,
    outcomes: Vec<CellOutcome>,
    equalities: (Vec<EqualityCheck>, Option<Witness>),
) -> Certificate {
    let (checks, eq_witness) = equalities;
    let mut stats = Stats { cells: outcomes.len() as u64, ..Stats::default() };
    let mut witness = None;
    let mut unresolved = Vec::new();
    let mut unresolved_total = 0;
    let mut notes = Vec::new();
    for o in outcomes {
        stats.boxes += o.boxes;
        stats.max_depth = stats.max_depth.max(o.max_depth);
        witness = lower_witness(witness, o.witness);
        unresolved_total += o.unresolved_total;
        for b in o.unresolved {
            if unresolved.len() < MAX_REPORTED_BOXES {
                unresolved.push(b);
            }
        }
        if let Some(n) = o.note {
            if !notes.contains(&n) && notes.len() < 8 {
                notes.push(n);
            }
        }
    }
    witness = lower_witness(witness, eq_witness);
    let equality_failed = checks.iter().any(|c| !c.holds);
    let status = if witness.is_some() {
        Status::Counterexample
    } else if unresolved_total > 0 || equality_failed {
        Status::Inconclusive
    } else {
        Status::Certified
    };
    if equality_failed && witness.is_none() {
        notes.push("an equality point exceeds the equality tolerance".to_string());
    }
    Certificate {
        case_id: case.id.to_string(),
        statement: case.statement.to_string(),
        status,
        domain: case.axes.clone(),
        witness,
        unresolved,
        unresolved_total,
        equalities: checks,
        notes,
        stats,
    }
}

/// Certifies one case over all of its regions.
pub fn certify_case(case: &InequalityCase, cfg: &VerifyConfig) -> Certificate {
    let outcomes: Vec<CellOutcome> = cells(case).iter().map(|c| run_cell(case, c, cfg)).collect();
    assemble(case, outcomes, check_equalities(case, cfg))
}

/// Certifies a case on a user-supplied box (lattice axes are enumerated).
///
/// The box is taken as is: equality points inside it are not removed, so a
/// box touching one comes back INCONCLUSIVE.
pub fn certify_box(case: &InequalityCase, bounds: &[Interval], cfg: &VerifyConfig) -> Result<Certificate> {
    if bounds.len() != case.axes.len() {
        return Err(invalid!("box has {} axes, case {} has {}", bounds.len(), case.id, case.axes.len()));
    }
    for (b, a) in bounds.iter().zip(&case.axes) {
        if b.lo() < a.lo || b.hi() > a.hi {
            return Err(invalid!("box {} leaves the domain [{}, {}] of axis {}", b, a.lo, a.hi, a.name));
        }
    }
    let ranges = bounds
        .iter()
        .zip(&case.axes)
        .map(|(b, a)| match a.kind {
            AxisKind::Continuous => Range::Continuous(*b),
            AxisKind::Lattice { step } => Range::Lattice {
                first: libm::ceil((b.lo() - a.lo) / step - 1e-9) as usize,
                last: libm::floor((b.hi() - a.lo) / step + 1e-9) as usize,
            },
        })
        .collect();
    let mut sub = case.clone();
    sub.regions = vec![Region { ranges }];
    sub.equalities.clear();
    let outcomes: Vec<CellOutcome> = cells(&sub).iter().map(|c| run_cell(&sub, c, cfg)).collect();
    Ok(assemble(&sub, outcomes, (Vec::new(), None)))
}

/// Certificates for every catalog case that is nonempty under the caps,
/// ordered by case id.
pub fn verify_all(cfg: &VerifyConfig) -> Result<Vec<Certificate>> {
    cfg.validate()?;
    let mut out: Vec<Certificate> =
        catalog_with(&cfg.caps).iter().filter(|c| !c.is_empty()).map(|c| certify_case(c, cfg)).collect();
    out.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    Ok(out)
}
