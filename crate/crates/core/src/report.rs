//! Approximation rows and their CSV / JSON / text renderings.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::oracle::{remainder_exact, OracleConfig};
use crate::resum::{remainder, Method};
use crate::scalar::{Scalar, DEFAULT_DIGITS};
use crate::solver::GammaVector;

pub const CSV_COLUMNS: [&str; 11] = [
    "family",
    "params",
    "n",
    "m",
    "method",
    "approx",
    "oracle",
    "corrected",
    "abs_err",
    "rel_err",
    "seconds",
];

/// Significant digits printed for error columns.
const ERROR_DIGITS: u32 = 10;

/// One (n, method) row. Numbers are decimal strings so no precision is lost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationReport {
    pub family: String,
    pub params: String,
    pub n: u64,
    pub m: usize,
    pub method: String,
    pub approx: Option<String>,
    pub oracle: Option<String>,
    pub corrected: Option<String>,
    pub abs_err: Option<String>,
    pub rel_err: Option<String>,
    pub seconds: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Failure class carried alongside a row so callers can pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    Invalid,
    OracleFailed,
}

fn render(x: &Scalar, digits: u32) -> String {
    match x {
        Scalar::Exact(_) => x.to_decimal(digits),
        Scalar::Real(_) => x.to_string(),
    }
}

/// Computes one row. `oracle` is the exact remainder at n when available.
pub fn approximation_row(
    family: &FamilySpec,
    gamma: &GammaVector,
    n: u64,
    method: Method,
    oracle: Option<&Result<Scalar>>,
    timing: bool,
) -> (ApproximationReport, RowStatus) {
    let digits = family.kind().digits().unwrap_or(DEFAULT_DIGITS);
    let mut row = ApproximationReport {
        family: family.name().to_string(),
        params: family.params_label(),
        n,
        m: gamma.m(),
        method: method.to_string(),
        approx: None,
        oracle: None,
        corrected: None,
        abs_err: None,
        rel_err: None,
        seconds: None,
        error: None,
    };
    let start = Instant::now();
    let computed =
        remainder(family, gamma, n, method).and_then(|r| Ok((family.partial_sum(n)? - &r, r)));
    let elapsed = start.elapsed().as_secs_f64();
    if timing {
        row.seconds = Some(format!("{elapsed:.6}"));
    }
    let (corrected, approx) = match computed {
        Ok(v) => v,
        Err(e) => {
            row.error = Some(e.to_string());
            return (row, status_of(&e));
        }
    };
    row.approx = Some(render(&approx, digits));
    row.corrected = Some(render(&corrected, digits));
    let mut status = RowStatus::Ok;
    match oracle {
        Some(Ok(exact)) => {
            let bits = exact.as_float().map(|x| x.prec()).unwrap_or(256);
            let approx_f = approx.to_float(bits);
            let exact_f = exact.to_float(bits);
            let abs = rug::Float::with_val(bits, &approx_f - &exact_f).abs();
            let rel = rug::Float::with_val(bits, &abs / exact_f.abs());
            row.oracle = Some(exact.to_string());
            row.abs_err = Some(crate::scalar::format_float(&abs, ERROR_DIGITS));
            row.rel_err = Some(crate::scalar::format_float(&rel, ERROR_DIGITS));
        }
        Some(Err(e)) => {
            row.error = Some(format!("oracle: {e}"));
            status = status_of(e);
        }
        None => {}
    }
    (row, status)
}

pub fn status_of(e: &Error) -> RowStatus {
    match e {
        Error::Oracle(_) => RowStatus::OracleFailed,
        _ => RowStatus::Invalid,
    }
}

/// Exact remainder for each n, computed once and shared by all methods.
pub fn oracle_column(family: &FamilySpec, n: u64, cfg: &OracleConfig) -> Result<Scalar> {
    cfg.check_consumer(family.kind())?;
    remainder_exact(family, n, cfg)
}

pub fn to_csv(rows: &[ApproximationReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in rows {
        let opt = |x: &Option<String>| x.clone().unwrap_or_default();
        let approx = match (&r.approx, &r.error) {
            (None, Some(e)) => format!("error: {e}"),
            _ => opt(&r.approx),
        };
        w.write_record([
            r.family.clone(),
            r.params.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.method.clone(),
            approx,
            opt(&r.oracle),
            opt(&r.corrected),
            opt(&r.abs_err),
            opt(&r.rel_err),
            opt(&r.seconds),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

pub fn to_json(rows: &[ApproximationReport]) -> Result<String> {
    serde_json::to_string_pretty(rows)
        .map(|s| s + "\n")
        .map_err(|e| Error::Internal(e.to_string()))
}

pub fn from_json(text: &str) -> Result<Vec<ApproximationReport>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_text(rows: &[ApproximationReport]) -> String {
    let mut out = String::new();
    for r in rows {
        let dash = || "-".to_string();
        out.push_str(&format!(
            "{} {} n={} m={} {}\n  approx    {}\n  oracle    {}\n  corrected {}\n  abs_err   {}  rel_err {}\n",
            r.family,
            r.params,
            r.n,
            r.m,
            r.method,
            r.approx.clone().unwrap_or_else(dash),
            r.oracle.clone().unwrap_or_else(dash),
            r.corrected.clone().unwrap_or_else(dash),
            r.abs_err.clone().unwrap_or_else(dash),
            r.rel_err.clone().unwrap_or_else(dash),
        ));
        if let Some(s) = &r.seconds {
            out.push_str(&format!("  seconds   {s}\n"));
        }
        if let Some(e) = &r.error {
            out.push_str(&format!("  error     {e}\n"));
        }
    }
    out
}
