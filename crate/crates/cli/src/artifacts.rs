//! Output files: CSV tables, JSON reports and plain-text summaries.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so the
//! output is locale-independent, loses no precision and is byte-identical
//! across runs on identical input.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::SCHEMA_VERSION;
use crate::error::{CliError, CliResult};

/// Shortest decimal text that parses back to `x` exactly.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes a header row and one row per time point.
pub fn write_table(
    path: &Path,
    header: &[String],
    times: &[f64],
    rows: &[Vec<f64>],
) -> CliResult<()> {
    let io = |e: csv::Error| CliError::io(path, e);
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    let mut rec = Vec::with_capacity(header.len());
    for (t, row) in times.iter().zip(rows) {
        rec.clear();
        rec.push(num(*t));
        rec.extend(row.iter().map(|&v| num(v)));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with a `schema_version` and `command` header.
pub fn write_json<T: Serialize>(path: &Path, command: &str, body: &T) -> CliResult<()> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        body,
    };
    let mut text = serde_json::to_string_pretty(&env)
        .map_err(|e| CliError::Compute(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for &x in &[0.1, -1e-300, 123456789.125, 1.0 / 3.0, 2e20, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.5), "0.5");
    }
}
