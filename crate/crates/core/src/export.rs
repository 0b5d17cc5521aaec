//! On-disk scan formats.
//!
//! CSV: `#`-prefixed `key = value` lines carrying the grid spec and metadata,
//! a header naming the axes, then one row per grid point, row-major:
//!
//! ```text
//! # formula = general
//! # axis = Delta 0.0000000000000000e0 6.2831853071795862e0 256
//! ...
//! Delta,eta,g2,reason
//! 0.0000000000000000e0,0.0000000000000000e0,3.6...e0,
//! ```
//!
//! Infeasible points leave `g2` empty and name a reason. JSON holds the same
//! content with `null` for infeasible points. Every float is written with 17
//! significant digits, so both formats round-trip bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::Deserializer;
use serde::ser::{Error as _, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use thiserror::Error;

use crate::analytic::Tolerances;
use crate::error::JanusError;
use crate::optimize::{Axis, GridSpec, OptimumKind, OptimumRecord, Param, Point, Reason};
use crate::scan::{Formula, ScanMeta, ScanResult};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: JanusError,
    },
    #[error("cannot encode non-finite value {0}")]
    NonFinite(f64),
    #[error("encoding failed: {0}")]
    Encode(String),
}

pub type ExportResult<T> = std::result::Result<T, ExportError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension().and_then(|e| e.to_str()).and_then(Format::parse)
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// `{:.16e}`: 17 significant digits, enough to recover any binary64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn finite(v: f64) -> ExportResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ExportError::NonFinite(v))
    }
}

pub fn write_scan(result: &ScanResult, path: &Path, format: Format) -> ExportResult<()> {
    let text = encode_scan(result, format)?;
    fs::write(path, text).map_err(|source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_scan(path: &Path, format: Format) -> ExportResult<ScanResult> {
    let text = fs::read_to_string(path).map_err(|source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_scan(&text, format, path)
}

pub fn encode_scan(result: &ScanResult, format: Format) -> ExportResult<String> {
    match format {
        Format::Csv => encode_csv(result),
        Format::Json => encode_json(result),
    }
}

/// Parse `text`; `origin` only labels error messages.
pub fn decode_scan(text: &str, format: Format, origin: &Path) -> ExportResult<ScanResult> {
    let res = match format {
        Format::Csv => decode_csv(text, origin)?,
        Format::Json => decode_json(text, origin)?,
    };
    res.validate().map_err(|source| ExportError::Invalid {
        path: origin.to_path_buf(),
        source,
    })?;
    Ok(res)
}

fn encode_csv(res: &ScanResult) -> ExportResult<String> {
    let mut out = String::new();
    let mut kv = |k: &str, v: &str| {
        let _ = writeln!(out, "# {k} = {v}");
    };
    kv("formula", res.formula.as_str());
    kv("engine_version", &res.meta.engine_version);
    kv("timestamp", &res.meta.timestamp.to_string());
    kv("tol_norm", &fmt_f64(finite(res.meta.tolerances.norm)?));
    kv("tol_oracle", &fmt_f64(finite(res.meta.tolerances.oracle)?));
    kv("equal_squeeze", &res.spec.equal_squeeze.to_string());
    for p in Param::ALL {
        kv(&format!("fixed.{p}"), &fmt_f64(finite(res.spec.fixed.get(p))?));
    }
    for a in &res.spec.axes {
        kv(
            "axis",
            &format!("{} {} {} {}", a.name, fmt_f64(finite(a.lo)?), fmt_f64(finite(a.hi)?), a.points),
        );
    }
    for a in &res.spec.axes {
        out.push_str(a.name.as_str());
        out.push(',');
    }
    out.push_str("g2,reason\n");
    for (i, (v, r)) in res.values.iter().zip(&res.reasons).enumerate() {
        for c in res.spec.coords(i) {
            out.push_str(&fmt_f64(c));
            out.push(',');
        }
        if let Some(v) = v {
            out.push_str(&fmt_f64(finite(*v)?));
        }
        out.push(',');
        if let Some(r) = r {
            out.push_str(r.as_str());
        }
        out.push('\n');
    }
    Ok(out)
}

fn decode_csv(text: &str, origin: &Path) -> ExportResult<ScanResult> {
    let err = |line: usize, column: usize, msg: String| ExportError::Parse {
        path: origin.to_path_buf(),
        line,
        column,
        msg,
    };
    let num = |s: &str, line: usize, column: usize| -> ExportResult<f64> {
        match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(err(line, column, format!("non-finite number {s:?}"))),
            Err(e) => Err(err(line, column, format!("bad number {s:?}: {e}"))),
        }
    };

    let mut formula = None;
    let mut meta = ScanMeta {
        timestamp: 0,
        engine_version: String::new(),
        tolerances: Tolerances::default(),
    };
    let mut equal_squeeze = false;
    let mut fixed = Point {
        r: 0.0,
        s: 0.0,
        orientation: 0.0,
        delta: 0.0,
        eta: 0.0,
    };
    let mut axes = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (header_no, header) = loop {
        let Some((no, line)) = lines.next() else {
            return Err(err(text.lines().count() + 1, 1, "missing header row".into()));
        };
        let Some(body) = line.strip_prefix('#') else {
            break (no, line);
        };
        let Some((key, value)) = body.split_once('=') else {
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        let vcol = line.rfind(value).map_or(1, |i| i + 1);
        match key {
            "formula" => {
                formula = Some(Formula::parse(value).map_err(|e| err(no, vcol, e.to_string()))?)
            }
            "engine_version" => meta.engine_version = value.to_string(),
            "timestamp" => {
                meta.timestamp = value
                    .parse()
                    .map_err(|e| err(no, vcol, format!("bad timestamp {value:?}: {e}")))?
            }
            "tol_norm" => meta.tolerances.norm = num(value, no, vcol)?,
            "tol_oracle" => meta.tolerances.oracle = num(value, no, vcol)?,
            "equal_squeeze" => {
                equal_squeeze = value
                    .parse()
                    .map_err(|e| err(no, vcol, format!("bad flag {value:?}: {e}")))?
            }
            "axis" => {
                let f: Vec<&str> = value.split_whitespace().collect();
                if f.len() != 4 {
                    return Err(err(no, vcol, format!("axis needs 4 fields, got {}", f.len())));
                }
                let name = Param::parse(f[0]).map_err(|e| err(no, vcol, e.to_string()))?;
                let points = f[3]
                    .parse()
                    .map_err(|e| err(no, vcol, format!("bad point count {:?}: {e}", f[3])))?;
                axes.push(Axis {
                    name,
                    lo: num(f[1], no, vcol)?,
                    hi: num(f[2], no, vcol)?,
                    points,
                });
            }
            k => {
                if let Some(p) = k.strip_prefix("fixed.") {
                    let p = Param::parse(p).map_err(|e| err(no, 1, e.to_string()))?;
                    fixed.set(p, num(value, no, vcol)?);
                }
            }
        }
    };

    let formula = formula.ok_or_else(|| err(header_no, 1, "no formula line before header".into()))?;
    let spec = GridSpec {
        axes,
        fixed,
        equal_squeeze,
    };
    spec.validate()
        .map_err(|e| err(header_no, 1, format!("invalid grid description: {e}")))?;

    let mut expected: Vec<&str> = spec.axes.iter().map(|a| a.name.as_str()).collect();
    expected.extend(["g2", "reason"]);
    let got: Vec<&str> = header.split(',').map(str::trim).collect();
    if got != expected {
        return Err(err(
            header_no,
            1,
            format!("header {:?} does not match {:?}", got, expected.join(",")),
        ));
    }

    let n = spec.len();
    let ncols = expected.len();
    let mut values = Vec::with_capacity(n);
    let mut reasons = Vec::with_capacity(n);
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let i = values.len();
        if i == n {
            return Err(err(no, 1, format!("more than {n} data rows")));
        }
        let mut cols = Vec::with_capacity(ncols);
        let mut start = 0;
        for field in line.split(',') {
            cols.push((start + 1, field));
            start += field.len() + 1;
        }
        if cols.len() != ncols {
            return Err(err(no, 1, format!("expected {ncols} fields, got {}", cols.len())));
        }
        for (k, c) in spec.coords(i).into_iter().enumerate() {
            let (col, field) = cols[k];
            if num(field, no, col)?.to_bits() != c.to_bits() {
                return Err(err(no, col, format!("coordinate {field} does not match grid value {c:e}")));
            }
        }
        let (gcol, g) = cols[ncols - 2];
        let (rcol, r) = cols[ncols - 1];
        values.push(if g.trim().is_empty() {
            None
        } else {
            Some(num(g, no, gcol)?)
        });
        reasons.push(if r.trim().is_empty() {
            None
        } else {
            Some(Reason::parse(r.trim()).ok_or_else(|| err(no, rcol, format!("unknown reason {r:?}")))?)
        });
    }
    if values.len() != n {
        return Err(err(
            text.lines().count() + 1,
            1,
            format!("expected {n} data rows, got {}", values.len()),
        ));
    }
    Ok(ScanResult {
        spec,
        formula,
        values,
        reasons,
        meta,
    })
}

/// A float that serializes with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
struct F17(f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom(format!("cannot encode non-finite value {}", self.0)));
        }
        RawValue::from_string(fmt_f64(self.0))
            .map_err(S::Error::custom)?
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(F17)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonAxis {
    name: Param,
    lo: F17,
    hi: F17,
    points: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonPoint {
    r: F17,
    s: F17,
    #[serde(rename = "Delta")]
    orientation: F17,
    delta: F17,
    eta: F17,
}

#[derive(Serialize, Deserialize)]
struct JsonSpec {
    axes: Vec<JsonAxis>,
    fixed: JsonPoint,
    equal_squeeze: bool,
}

#[derive(Serialize, Deserialize)]
struct JsonTolerances {
    norm: F17,
    oracle: F17,
}

#[derive(Serialize, Deserialize)]
struct JsonMeta {
    timestamp: u64,
    engine_version: String,
    tolerances: JsonTolerances,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonScan {
    spec: JsonSpec,
    formula: Formula,
    values: Vec<Option<F17>>,
    reasons: Vec<Option<Reason>>,
    meta: JsonMeta,
}

fn encode_json(res: &ScanResult) -> ExportResult<String> {
    for v in res.values.iter().flatten() {
        finite(*v)?;
    }
    let f = |p: Param| F17(res.spec.fixed.get(p));
    let doc = JsonScan {
        spec: JsonSpec {
            axes: res
                .spec
                .axes
                .iter()
                .map(|a| JsonAxis {
                    name: a.name,
                    lo: F17(a.lo),
                    hi: F17(a.hi),
                    points: a.points,
                })
                .collect(),
            fixed: JsonPoint {
                r: f(Param::R),
                s: f(Param::S),
                orientation: f(Param::Orientation),
                delta: f(Param::Phase),
                eta: f(Param::Eta),
            },
            equal_squeeze: res.spec.equal_squeeze,
        },
        formula: res.formula,
        values: res.values.iter().map(|v| v.map(F17)).collect(),
        reasons: res.reasons.clone(),
        meta: JsonMeta {
            timestamp: res.meta.timestamp,
            engine_version: res.meta.engine_version.clone(),
            tolerances: JsonTolerances {
                norm: F17(res.meta.tolerances.norm),
                oracle: F17(res.meta.tolerances.oracle),
            },
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| ExportError::Encode(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn decode_json(text: &str, origin: &Path) -> ExportResult<ScanResult> {
    let doc: JsonScan = serde_json::from_str(text).map_err(|e| ExportError::Parse {
        path: origin.to_path_buf(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    Ok(ScanResult {
        spec: GridSpec {
            axes: doc
                .spec
                .axes
                .into_iter()
                .map(|a| Axis {
                    name: a.name,
                    lo: a.lo.0,
                    hi: a.hi.0,
                    points: a.points,
                })
                .collect(),
            fixed: Point {
                r: doc.spec.fixed.r.0,
                s: doc.spec.fixed.s.0,
                orientation: doc.spec.fixed.orientation.0,
                delta: doc.spec.fixed.delta.0,
                eta: doc.spec.fixed.eta.0,
            },
            equal_squeeze: doc.spec.equal_squeeze,
        },
        formula: doc.formula,
        values: doc.values.into_iter().map(|v| v.map(|f| f.0)).collect(),
        reasons: doc.reasons,
        meta: ScanMeta {
            timestamp: doc.meta.timestamp,
            engine_version: doc.meta.engine_version,
            tolerances: Tolerances {
                norm: doc.meta.tolerances.norm.0,
                oracle: doc.meta.tolerances.oracle.0,
            },
        },
    })
}

#[derive(Serialize)]
struct JsonRecord {
    r: F17,
    s: F17,
    #[serde(rename = "Delta")]
    orientation: F17,
    delta: F17,
    eta_mag: F17,
    chi_mag: F17,
    g2: F17,
    kind: OptimumKind,
    evaluations: usize,
    skipped: usize,
    converged: bool,
}

/// Optimizer output as CSV rows or a JSON array.
pub fn encode_records(records: &[OptimumRecord], format: Format) -> ExportResult<String> {
    for rec in records {
        for v in [rec.r, rec.s, rec.orientation, rec.delta, rec.eta_mag, rec.chi_mag, rec.g2] {
            finite(v)?;
        }
    }
    match format {
        Format::Csv => {
            let mut out = String::from("r,s,Delta,delta,eta,chi,g2,kind,evaluations,skipped,converged\n");
            for rec in records {
                let kind = serde_json::to_value(rec.kind)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{kind},{},{},{}",
                    fmt_f64(rec.r),
                    fmt_f64(rec.s),
                    fmt_f64(rec.orientation),
                    fmt_f64(rec.delta),
                    fmt_f64(rec.eta_mag),
                    fmt_f64(rec.chi_mag),
                    fmt_f64(rec.g2),
                    rec.evaluations,
                    rec.skipped,
                    rec.converged
                );
            }
            Ok(out)
        }
        Format::Json => {
            let rows: Vec<JsonRecord> = records
                .iter()
                .map(|r| JsonRecord {
                    r: F17(r.r),
                    s: F17(r.s),
                    orientation: F17(r.orientation),
                    delta: F17(r.delta),
                    eta_mag: F17(r.eta_mag),
                    chi_mag: F17(r.chi_mag),
                    g2: F17(r.g2),
                    kind: r.kind,
                    evaluations: r.evaluations,
                    skipped: r.skipped,
                    converged: r.converged,
                })
                .collect();
            let mut s =
                serde_json::to_string_pretty(&rows).map_err(|e| ExportError::Encode(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn write_records(records: &[OptimumRecord], path: &Path, format: Format) -> ExportResult<()> {
    let text = encode_records(records, format)?;
    fs::write(path, text).map_err(|source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    })
}
