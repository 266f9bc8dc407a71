//! Command-line front end.
//!
//! Exit codes: 0 success, 1 counterexample or failed check, 2 inconclusive
//! certification, 64 usage error, 65 invalid input data or domain.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gammasect_core::certify::{self, Caps, Status, VerifyConfig, CASE_IDS};
use gammasect_core::geometry::{self, InnerNorm, PBall, PSumBody};
use gammasect_core::sections::StarBody;

use crate::parallel;
use crate::report::{num, BoundCheck, Format, Quantity, Report, Results, SectionRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

/// Standard errors allowed below a bound before a section check fails.
pub const CHECK_SIGMAS: f64 = 3.0;

#[derive(Debug, Parser)]
#[command(name = "gammasect", version, about = "Certified Gamma-function inequalities and l_p-ball section volumes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify inequality cases by interval bisection.
    Verify(VerifyArgs),
    /// Closed-form volumes and bound constants.
    Volume(VolumeArgs),
    /// Monte Carlo scan for the smallest central k-section.
    Sections(SectionsArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Report file; the report goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated case ids, or `all`.
    #[arg(long, default_value = "all")]
    pub cases: String,
    #[arg(long, default_value_t = 100.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 100.0)]
    pub y_max: f64,
    #[arg(long, default_value_t = 60)]
    pub n_max: u32,
    /// Bisection depth limit.
    #[arg(long, default_value_t = 40)]
    pub depth: u32,
    /// Points per axis of the fallback scan over unresolved boxes.
    #[arg(long, default_value_t = 2048)]
    pub grid: u32,
    /// Multiplies every claimed inequality by `1 + m` (testing only).
    #[cfg(feature = "test-hooks")]
    #[arg(long, allow_negative_numbers = true)]
    pub mutate: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BodyArgs {
    /// Ambient dimension of the l_p ball.
    #[arg(long)]
    pub n: Option<usize>,
    /// Exponent of the ball, or the outer exponent of a p-sum.
    #[arg(long)]
    pub p: f64,
    /// p-sum parts `dim:norm,...` with norm `e` (euclidean) or `1` (l_1).
    #[arg(long, conflicts_with = "n")]
    pub psum: Option<String>,
}

#[derive(Debug, Args)]
pub struct VolumeArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    /// volume | isotropy | hensley | ellipsoid:K | lowp | diag
    #[arg(long, default_value = "volume", value_parser = parse_quantity)]
    pub quantity: QuantityKind,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    /// min^{1/k} >= |K|^{1/dim K}.
    Eq1,
    /// min^{1/k} >= c(p) |K|^{1/dim K} for 0 < p <= 1.
    Prop25,
    None,
}

#[derive(Debug, Args)]
pub struct SectionsArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    /// Section dimension.
    #[arg(long)]
    pub k: usize,
    /// Haar-random subspaces, in addition to the canonical ones.
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    /// Samples per subspace.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "none")]
    pub check: CheckKind,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantityKind {
    Volume,
    Isotropy,
    Hensley,
    Ellipsoid(usize),
    LowP,
    Diag,
}

fn parse_quantity(s: &str) -> Result<QuantityKind, String> {
    Ok(match s {
        "volume" => QuantityKind::Volume,
        "isotropy" => QuantityKind::Isotropy,
        "hensley" => QuantityKind::Hensley,
        "lowp" => QuantityKind::LowP,
        "diag" => QuantityKind::Diag,
        _ => match s.strip_prefix("ellipsoid:") {
            Some(k) => QuantityKind::Ellipsoid(k.parse().map_err(|_| format!("bad section dimension in {s:?}"))?),
            None => return Err(format!("unknown quantity {s:?}")),
        },
    })
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl From<gammasect_core::Error> for CliError {
    fn from(e: gammasect_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<parallel::PoolError> for CliError {
    fn from(e: parallel::PoolError) -> Self {
        match e {
            parallel::PoolError::BadThreadCount(_) => CliError::Usage(e.to_string()),
            parallel::PoolError::Build(_) => CliError::Data(e.to_string()),
        }
    }
}

impl From<crate::report::ReportError> for CliError {
    fn from(e: crate::report::ReportError) -> Self {
        CliError::Data(e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gammasect: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("Run `gammasect --help` for usage.");
            }
            e.code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Volume(a) => cmd_volume(a),
        Command::Sections(a) => cmd_sections(a),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    Ok(parallel::pool(parallel::threads_from_env()?)?)
}

/// Writes the report; returns whether it went to stdout.
fn emit(report: &Report, out: &OutputArgs) -> Result<bool, CliError> {
    let text = report.render(out.format)?;
    match &out.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
            Ok(false)
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).and_then(|_| so.flush()).map_err(|e| CliError::Data(e.to_string()))?;
            Ok(true)
        }
    }
}

/// Human-readable lines go to stdout unless the report already does.
fn summary(to_stdout: bool, lines: &[String]) {
    for l in lines {
        if to_stdout {
            println!("{l}");
        } else {
            eprintln!("{l}");
        }
    }
}

fn select_cases(spec: &str) -> Result<Vec<&'static str>, CliError> {
    if spec.trim() == "all" {
        return Ok(CASE_IDS.to_vec());
    }
    let mut out = Vec::new();
    for id in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let Some(known) = CASE_IDS.iter().find(|c| **c == id) else {
            return Err(CliError::Usage(format!("unknown case id {id:?}; known ids: {}", CASE_IDS.join(", "))));
        };
        if !out.contains(known) {
            out.push(*known);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no case ids given".into()));
    }
    Ok(out)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32, CliError> {
    let ids = select_cases(&a.cases)?;
    #[cfg(feature = "test-hooks")]
    let mutation = a.mutate.unwrap_or(0.0);
    #[cfg(not(feature = "test-hooks"))]
    let mutation = 0.0;
    let cfg = VerifyConfig {
        caps: Caps { x_max: a.x_max, y_max: a.y_max, n_max: a.n_max },
        depth_limit: a.depth,
        grid_fallback: a.grid,
        mutation,
        ..VerifyConfig::default()
    };
    cfg.validate()?;
    let mut skipped = Vec::new();
    let cases: Vec<_> = certify::catalog_with(&cfg.caps)
        .into_iter()
        .filter(|c| ids.contains(&c.id))
        .filter(|c| {
            if c.is_empty() {
                skipped.push(c.id);
            }
            !c.is_empty()
        })
        .collect();
    if cases.is_empty() {
        return Err(CliError::Data(format!("every selected case is empty under the caps: {}", skipped.join(", "))));
    }
    let pool = thread_pool()?;
    let certs = parallel::verify_cases(&pool, &cases, &cfg);

    let mut params = BTreeMap::new();
    params.insert("cases".into(), ids.join(","));
    params.insert("x_max".into(), a.x_max.to_string());
    params.insert("y_max".into(), a.y_max.to_string());
    params.insert("n_max".into(), a.n_max.to_string());
    params.insert("depth".into(), a.depth.to_string());
    params.insert("grid".into(), a.grid.to_string());
    if mutation != 0.0 {
        params.insert("mutation".into(), mutation.to_string());
    }
    if !skipped.is_empty() {
        params.insert("skipped_empty".into(), skipped.join(","));
    }

    let mut lines: Vec<String> = certs
        .iter()
        .map(|c| {
            let mut l = format!("{:<12} {:<14} boxes={}", c.case_id, c.status.as_str(), c.stats.boxes);
            if let Some(w) = &c.witness {
                l += &format!(" witness={:?} gap={:e}", w.point, w.gap);
            }
            if c.unresolved_total > 0 {
                l += &format!(" unresolved={}", c.unresolved_total);
            }
            l
        })
        .collect();
    if let Some(t) = certs.first().and_then(|c| c.stats.elapsed) {
        lines.push(format!("elapsed {:.2?}", t));
    }
    let report = Report::new("verify", params, Results::Certificates(certs), 0);
    let code = match report.worst_status() {
        Some(Status::Counterexample) => EXIT_FAIL,
        Some(Status::Inconclusive) => EXIT_INCONCLUSIVE,
        _ => EXIT_OK,
    };
    let to_stdout = emit(&report, &a.output)?;
    summary(!to_stdout, &lines);
    Ok(code)
}

enum Body {
    Ball(PBall),
    PSum(PSumBody),
}

impl Body {
    fn label(&self) -> String {
        match self {
            Body::Ball(b) => format!("B_p^n[n={},p={}]", b.n(), b.p()),
            Body::PSum(k) => {
                let parts: Vec<String> = k
                    .parts()
                    .iter()
                    .map(|(d, nm)| format!("{d}:{}", if *nm == InnerNorm::Euclidean { "e" } else { "1" }))
                    .collect();
                format!("psum[{};p={}]", parts.join(","), k.p())
            }
        }
    }

    fn dim(&self) -> usize {
        match self {
            Body::Ball(b) => b.n(),
            Body::PSum(k) => k.dim(),
        }
    }

    fn log_volume(&self) -> gammasect_core::Result<f64> {
        match self {
            Body::Ball(b) => geometry::log_volume(b),
            Body::PSum(k) => geometry::log_volume_psum(k),
        }
    }
}

fn parse_psum(spec: &str, p: f64) -> Result<PSumBody, CliError> {
    let mut parts = Vec::new();
    for item in spec.split(',').map(str::trim) {
        let (d, nm) = item
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("p-sum part {item:?} is not of the form dim:norm")))?;
        let d: usize = d.trim().parse().map_err(|_| CliError::Usage(format!("bad dimension in p-sum part {item:?}")))?;
        let nm = match nm.trim() {
            "e" | "2" => InnerNorm::Euclidean,
            "1" => InnerNorm::Ell1,
            other => return Err(CliError::Usage(format!("unknown inner norm {other:?}; use e or 1"))),
        };
        parts.push((d, nm));
    }
    Ok(PSumBody::new(parts, p)?)
}

fn parse_body(b: &BodyArgs) -> Result<Body, CliError> {
    match (&b.psum, b.n) {
        (Some(spec), _) => Ok(Body::PSum(parse_psum(spec, b.p)?)),
        (None, Some(n)) => Ok(Body::Ball(PBall::new(n, b.p)?)),
        (None, None) => Err(CliError::Usage("either --n or --psum is required".into())),
    }
}

fn quantity(name: &str, body: String, log_value: f64, note: Option<String>) -> Quantity {
    Quantity { name: name.into(), body, value: log_value.exp(), log_value, note }
}

fn cmd_volume(a: VolumeArgs) -> Result<i32, CliError> {
    let mut q = Vec::new();
    let ball = |b: &BodyArgs| -> Result<PBall, CliError> {
        if b.psum.is_some() {
            return Err(CliError::Usage("this quantity is defined for l_p balls only".into()));
        }
        let n = b.n.ok_or_else(|| CliError::Usage("--n is required for this quantity".into()))?;
        Ok(PBall::new(n, b.p)?)
    };
    match a.quantity {
        QuantityKind::Volume => {
            let body = parse_body(&a.body)?;
            q.push(quantity("volume", body.label(), body.log_volume()?, None));
        }
        QuantityKind::Isotropy => {
            let b = ball(&a.body)?;
            let l2 = geometry::isotropy_constant_sq(&b)?;
            q.push(Quantity {
                name: "isotropy_constant_sq".into(),
                body: Body::Ball(b).label(),
                value: l2,
                log_value: l2.ln(),
                note: None,
            });
        }
        QuantityKind::Hensley => {
            let b = ball(&a.body)?;
            let v = geometry::hensley_lower_bound(&b)?;
            q.push(Quantity { name: "hensley_lower_bound".into(), body: Body::Ball(b).label(), value: v, log_value: v.ln(), note: None });
        }
        QuantityKind::Ellipsoid(k) => {
            let b = ball(&a.body)?;
            let v = geometry::ellipsoid_lower_bound(&b, k)?;
            q.push(Quantity {
                name: format!("ellipsoid_lower_bound[k={k}]"),
                body: Body::Ball(b).label(),
                value: v,
                log_value: v.ln(),
                note: None,
            });
        }
        QuantityKind::LowP => {
            if a.body.psum.is_some() || a.body.n.is_some() {
                return Err(CliError::Usage("lowp depends on --p only".into()));
            }
            let c = geometry::low_p_constant(a.body.p)?;
            let note = c.underflow.then(|| "value underflows; log_value is exact".to_string());
            q.push(Quantity { name: "low_p_constant".into(), body: format!("p={}", a.body.p), value: c.value, log_value: c.log_value, note });
        }
        QuantityKind::Diag => {
            let b = ball(&a.body)?;
            let r = geometry::diagonal_section_ratio(&b)?;
            let len = geometry::diagonal_section_length(&b);
            let label = Body::Ball(b).label();
            q.push(Quantity { name: "diagonal_section_ratio".into(), body: label.clone(), value: r, log_value: r.ln(), note: None });
            q.push(Quantity { name: "diagonal_section_length".into(), body: label, value: len, log_value: len.ln(), note: None });
        }
    }
    if q.iter().any(|x| !x.value.is_finite() || !x.log_value.is_finite()) {
        return Err(CliError::Data("quantity is not representable as a finite double".into()));
    }
    let mut params = BTreeMap::new();
    params.insert("quantity".into(), quantity_name(a.quantity));
    params.insert("p".into(), a.body.p.to_string());
    if let Some(n) = a.body.n {
        params.insert("n".into(), n.to_string());
    }
    if let Some(s) = &a.body.psum {
        params.insert("psum".into(), s.clone());
    }
    let lines: Vec<String> = q.iter().map(|x| format!("{} {} = {}", x.name, x.body, num(x.value))).collect();
    let report = Report::new("volume", params, Results::Quantities(q), 0);
    let to_stdout = emit(&report, &a.output)?;
    summary(!to_stdout, &lines);
    Ok(EXIT_OK)
}

fn quantity_name(q: QuantityKind) -> String {
    match q {
        QuantityKind::Volume => "volume".into(),
        QuantityKind::Isotropy => "isotropy".into(),
        QuantityKind::Hensley => "hensley".into(),
        QuantityKind::Ellipsoid(k) => format!("ellipsoid:{k}"),
        QuantityKind::LowP => "lowp".into(),
        QuantityKind::Diag => "diag".into(),
    }
}

fn check_bound(kind: CheckKind, body: &Body) -> Result<Option<(String, f64)>, CliError> {
    let root_vol = (body.log_volume()? / body.dim() as f64).exp();
    match kind {
        CheckKind::None => Ok(None),
        CheckKind::Eq1 => Ok(Some(("eq1".into(), root_vol))),
        CheckKind::Prop25 => {
            let p = match body {
                Body::Ball(b) => b.p(),
                Body::PSum(k) if k.parts().iter().all(|(_, nm)| *nm == InnerNorm::Ell1) => k.p(),
                Body::PSum(_) => {
                    return Err(CliError::Data("prop25 applies to l_p balls and p-sums of l_1 parts".into()));
                }
            };
            let c = geometry::low_p_constant(p)?;
            Ok(Some(("prop25".into(), c.value * root_vol)))
        }
    }
}

fn cmd_sections(a: SectionsArgs) -> Result<i32, CliError> {
    let body = parse_body(&a.body)?;
    let bound = check_bound(a.check, &body)?;
    let pool = thread_pool()?;
    let sb: &(dyn StarBody + Sync) = match &body {
        Body::Ball(b) => b,
        Body::PSum(k) => k,
    };
    let (scan, _) = parallel::min_section_scan(&pool, sb, a.k, a.trials, a.samples, a.seed)?;
    let (root, root_se) = scan.min.root(a.k);
    let check = bound.map(|(name, bound)| {
        let margin = root - bound;
        BoundCheck {
            check: name,
            bound,
            margin,
            margin_sigma: (root_se > 0.0).then(|| margin / root_se),
            sigmas: CHECK_SIGMAS,
            pass: margin >= -CHECK_SIGMAS * root_se,
        }
    });
    let pass = check.as_ref().is_none_or(|c| c.pass);

    let mut lines = vec![format!(
        "{} k={}: min section {} ± {} over {} subspaces (argmin {}), root {} ± {}",
        body.label(),
        a.k,
        num(scan.min.value),
        num(scan.min.std_error),
        scan.evaluated,
        crate::report::fmt_candidate(scan.candidate),
        num(root),
        num(root_se)
    )];
    if let Some(c) = &check {
        let sig = c.margin_sigma.map_or("exact".to_string(), |s| format!("{s:.2} sigma"));
        lines.push(format!(
            "check {}: bound {} margin {} ({sig}) {}",
            c.check,
            num(c.bound),
            num(c.margin),
            if c.pass { "PASS" } else { "FAIL" }
        ));
    }

    let mut params = BTreeMap::new();
    params.insert("body".into(), body.label());
    params.insert("k".into(), a.k.to_string());
    params.insert("trials".into(), a.trials.to_string());
    params.insert("samples".into(), a.samples.to_string());
    params.insert("check".into(), format!("{:?}", a.check).to_lowercase());
    let record = SectionRecord {
        body: body.label(),
        k: a.k,
        candidates: scan.evaluated,
        argmin: scan.candidate,
        basis: scan.argmin,
        min: scan.min,
        root,
        root_std_error: root_se,
        check,
    };
    let report = Report::new("sections", params, Results::Sections(vec![record]), a.seed);
    let to_stdout = emit(&report, &a.output)?;
    summary(!to_stdout, &lines);
    Ok(if pass { EXIT_OK } else { EXIT_FAIL })
}
