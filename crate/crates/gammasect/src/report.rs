//! Versioned run reports, serialized as JSON (full structure) or CSV (one
//! row per result).

use std::collections::BTreeMap;

use chrono::{DateTime, SecondsFormat, Utc};
use gammasect_core::certify::{Certificate, Status};
use gammasect_core::sections::{Candidate, SectionEstimate, Subspace};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub results: Results,
    /// RFC 3339, UTC.
    pub timestamp: String,
    /// Zero for commands that draw no random numbers.
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "items", rename_all = "snake_case")]
pub enum Results {
    Certificates(Vec<Certificate>),
    Quantities(Vec<Quantity>),
    Sections(Vec<SectionRecord>),
}

impl Results {
    pub fn len(&self) -> usize {
        match self {
            Results::Certificates(v) => v.len(),
            Results::Quantities(v) => v.len(),
            Results::Sections(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A closed-form quantity of a body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub body: String,
    pub value: f64,
    pub log_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Comparison of a section minimum with a lower bound, in standard errors
/// of `min^{1/k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub check: String,
    pub bound: f64,
    pub margin: f64,
    /// `margin / std_error`; absent when the estimate has no variance.
    pub margin_sigma: Option<f64>,
    pub sigmas: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionRecord {
    pub body: String,
    pub k: usize,
    pub candidates: u64,
    pub argmin: Candidate,
    pub basis: Subspace,
    pub min: SectionEstimate,
    /// `min^{1/k}` and its standard error.
    pub root: f64,
    pub root_std_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<BoundCheck>,
}

/// `SOURCE_DATE_EPOCH` when set (reproducible builds convention), else now.
pub fn timestamp() -> String {
    let t = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .and_then(|s| DateTime::<Utc>::from_timestamp(s, 0))
        .unwrap_or_else(Utc::now);
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Report {
    pub fn new(command: &str, parameters: BTreeMap<String, String>, results: Results, seed: u64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            parameters,
            results,
            timestamp: timestamp(),
            seed,
        }
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(s)?)
    }

    /// One row per result. Columns: `id, status, value, error, detail,
    /// parameters`; `parameters` joins the run parameters as `key=value;`.
    pub fn to_csv(&self) -> Result<String, ReportError> {
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let params = params.join(";");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "status", "value", "error", "detail", "parameters"])?;
        match &self.results {
            Results::Certificates(cs) => {
                for c in cs {
                    let (value, error, point) = match &c.witness {
                        Some(wt) => (num(wt.gap), num(wt.eval_error), fmt_point(&wt.point)),
                        None => (String::new(), String::new(), String::new()),
                    };
                    let eq = c.equalities.iter().fold(0.0f64, |m, e| m.max(e.max_abs_gap));
                    let detail = format!(
                        "witness={point} unresolved={} boxes={} equality_gap={}",
                        c.unresolved_total, c.stats.boxes, num(eq)
                    );
                    w.write_record([c.case_id.as_str(), c.status.as_str(), &value, &error, &detail, &params])?;
                }
            }
            Results::Quantities(qs) => {
                for q in qs {
                    let detail = format!("body={} log_value={}", q.body, num(q.log_value));
                    w.write_record([q.name.as_str(), "OK", &num(q.value), "", &detail, &params])?;
                }
            }
            Results::Sections(ss) => {
                for s in ss {
                    let status = match &s.check {
                        Some(c) if c.pass => "PASS",
                        Some(_) => "FAIL",
                        None => "ESTIMATE",
                    };
                    let mut detail = format!(
                        "body={} k={} argmin={} root={} root_std_error={} samples={}",
                        s.body,
                        s.k,
                        fmt_candidate(s.argmin),
                        num(s.root),
                        num(s.root_std_error),
                        s.min.samples
                    );
                    if let Some(c) = &s.check {
                        detail += &format!(" check={} bound={} margin={}", c.check, num(c.bound), num(c.margin));
                    }
                    let id = format!("{}:k={}", s.body, s.k);
                    w.write_record([
                        id.as_str(),
                        status,
                        &num(s.min.value),
                        &num(s.min.std_error),
                        &detail,
                        &params,
                    ])?;
                }
            }
        }
        w.flush()?;
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
    }

    pub fn render(&self, format: Format) -> Result<String, ReportError> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Worst certificate status, `None` for other result kinds.
    pub fn worst_status(&self) -> Option<Status> {
        match &self.results {
            Results::Certificates(cs) => cs.iter().map(|c| c.status).max_by_key(|s| match s {
                Status::Certified => 0,
                Status::Inconclusive => 1,
                Status::Counterexample => 2,
            }),
            _ => None,
        }
    }
}

fn fmt_point(p: &[f64]) -> String {
    let v: Vec<String> = p.iter().map(|x| num(*x)).collect();
    format!("({})", v.join(","))
}

pub fn fmt_candidate(c: Candidate) -> String {
    match c {
        Candidate::AxisAligned => "axis_aligned".to_string(),
        Candidate::BlockDiagonal => "block_diagonal".to_string(),
        Candidate::Haar(t) => format!("haar_{t}"),
    }
}

/// Shortest round-trip form, switching to exponent notation outside
/// `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}
