//! Plain CSV output. No quoting is ever needed: every field is a number, a
//! fixed identifier, or empty.

use std::fmt::Write as _;
use std::path::Path;

use crate::cli::config::{EvalMethod, SweepParam};
use crate::cli::sweep::ResultRow;
use crate::error::{Error, Result};

pub const HEADER: &str = "sweep_param,value,scheme,user,method,outage,stderr,trials,seed,J";

/// 17 significant digits, enough to round-trip any f64.
fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.sweep_param,
            float(r.value),
            r.scheme,
            r.user,
            r.method,
            opt(r.outage, float),
            opt(r.stderr, float),
            opt(r.trials, |t| t.to_string()),
            opt(r.seed, |t| t.to_string()),
            opt(r.chebyshev_order, |t| t.to_string()),
        );
    }
    s
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    std::fs::write(path, to_csv_string(rows)).map_err(|e| Error::io(path, e))
}

/// Inverse of [`to_csv_string`].
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == HEADER => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| parse_line(line).map_err(|e| format!("line {}: {e}", i + 2)))
        .collect()
}

fn parse_line(line: &str) -> Result<ResultRow, String> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 10 {
        return Err(format!("expected 10 fields, found {}", f.len()));
    }
    fn num<T: std::str::FromStr>(s: &str) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|e| format!("`{s}`: {e}"))
        }
    }
    Ok(ResultRow {
        sweep_param: f[0].parse::<SweepParam>()?,
        value: num(f[1])?.ok_or("empty value")?,
        scheme: f[2].parse()?,
        user: num(f[3])?.ok_or("empty user")?,
        method: f[4].parse::<EvalMethod>()?,
        outage: num(f[5])?,
        stderr: num(f[6])?,
        trials: num(f[7])?,
        seed: num(f[8])?,
        chebyshev_order: num(f[9])?,
    })
}
