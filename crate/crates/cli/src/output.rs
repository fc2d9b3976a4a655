//! Deterministic JSON and CSV rendering.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use nalgebra::DMatrix;
use procrustes_core::AlphaParam;
use serde_json::{json, Value};

use crate::error::CliResult;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}")
        .parse()
        .expect("formatted float parses back")
}

/// Shortest decimal form of the rounded value.
pub fn fmt12(x: f64) -> String {
    let r = round12(x);
    if r == r.trunc() && r.abs() < 1e15 {
        format!("{r:.1}")
    } else {
        format!("{r}")
    }
}

pub fn alpha_json(alpha: AlphaParam) -> Value {
    if alpha.is_log_limit() {
        json!("log-limit")
    } else {
        json!(round12(alpha.value()))
    }
}

pub fn alpha_text(alpha: AlphaParam) -> String {
    if alpha.is_log_limit() {
        "log-limit".into()
    } else {
        fmt12(alpha.value())
    }
}

pub fn num(x: f64) -> Value {
    json!(round12(x))
}

pub fn matrix_json(m: &DMatrix<f64>) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| Value::Array(r.iter().map(|&v| num(v)).collect()))
            .collect(),
    )
}

pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in m.row_iter() {
        let fields: Vec<String> = r.iter().map(|&v| fmt12(v)).collect();
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

/// Adds `"schema"` and renders with sorted keys.
pub fn json_document(mut body: serde_json::Map<String, Value>) -> String {
    body.insert("schema".into(), json!(SCHEMA_VERSION));
    let mut s = serde_json::to_string_pretty(&Value::Object(body)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Writes to `path`, or to `stdout` when no path is given.
pub fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| crate::error::CliError::usage(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(Into::into),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(5.656854249492381), 5.65685424949);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(-2.5e-20), -2.5e-20);
        assert_eq!(fmt12(2.0), "2.0");
        assert_eq!(fmt12(0.1 + 0.2), "0.3");
    }

    #[test]
    fn schema_is_present_and_keys_sorted() {
        let mut m = serde_json::Map::new();
        m.insert("zeta".into(), json!(1));
        m.insert("alpha".into(), json!(2));
        let doc = json_document(m);
        assert!(doc.find("alpha").unwrap() < doc.find("schema").unwrap());
        assert!(doc.find("schema").unwrap() < doc.find("zeta").unwrap());
    }
}
