//! Tabular reports written as CSV or JSON.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::CliError;

/// Significant digits of ordinary CSV reals.
pub const CSV_DIGITS: usize = 9;
/// Significant digits of printed Green-function values.
pub const PRECISE_DIGITS: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    /// Real printed with [`PRECISE_DIGITS`].
    Precise(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => scientific(*v, CSV_DIGITS),
            Cell::Precise(v) => scientific(*v, PRECISE_DIGITS),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) | Cell::Precise(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// `digits` significant digits in scientific notation, e.g. `1.23456789e-3`.
pub fn scientific(v: f64, digits: usize) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{:.*e}", digits - 1, v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub timestamp_unix: u64,
}

impl Metadata {
    pub fn tool_version() -> String {
        format!("biquat-cli {}", env!("CARGO_PKG_VERSION"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub metadata: Metadata,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    /// Two `#` metadata lines (the second holds the timestamp), a header and the rows.
    fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let m = &self.metadata;
        writeln!(
            out,
            "# tool={} command={} config_sha256={} seed={}",
            Metadata::tool_version(),
            m.command,
            m.config_sha256,
            m.seed
        )?;
        writeln!(out, "# timestamp_unix={}", m.timestamp_unix)?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let m = &self.metadata;
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().zip(r).map(|(k, c)| (k.to_string(), c.json())).collect::<Map<_, _>>()))
            .collect();
        let doc = json!({
            "metadata": {
                "tool": Metadata::tool_version(),
                "command": m.command,
                "config_sha256": m.config_sha256,
                "seed": m.seed,
                "timestamp_unix": m.timestamp_unix,
            },
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }
}
