//! CSV and JSON emission with fixed number formatting, so that identical
//! inputs give byte-identical files.

use std::io::Write;

use serde_json::{Map, Value};

use crate::scan::ScanRow;

pub const SCAN_HEADER: [&str; 5] = ["F", "E_closed", "E_numeric", "theta_stars", "gap"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("nothing to emit")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Nine significant digits in positional notation, switching to exponent
/// form only for magnitudes outside `[1e-5, 1e9)`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Rounding to nine digits can carry into the next decade, so take the
    // exponent from the rounded form.
    let sci = format!("{x:.8e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if (-5..9).contains(&exp) {
        format!("{:.*}", (8 - exp) as usize, x)
    } else {
        sci
    }
}

pub fn angles(thetas: &[f64]) -> String {
    thetas
        .iter()
        .map(|t| format!("{t:.9}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn opt(x: Option<f64>) -> String {
    x.map(sig9).unwrap_or_default()
}

pub fn emit_scan<W: Write>(
    rows: &[ScanRow],
    format: OutputFormat,
    sink: W,
) -> Result<(), OutputError> {
    if rows.is_empty() {
        return Err(OutputError::Empty);
    }
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(SCAN_HEADER)?;
            for r in rows {
                w.write_record([
                    sig9(r.f),
                    opt(r.e_closed),
                    opt(r.e_numeric),
                    angles(&r.theta_stars),
                    opt(r.gap),
                ])?;
            }
            w.flush()?;
        }
        OutputFormat::Json => write_json(sink, &serde_json::to_value(rows)?)?,
    }
    Ok(())
}

fn write_json<W: Write>(mut sink: W, value: &Value) -> Result<(), OutputError> {
    serde_json::to_writer_pretty(&mut sink, value)?;
    sink.write_all(b"\n")?;
    Ok(())
}

/// One result row with named columns, plus JSON-only attachments such as
/// decompositions.
#[derive(Debug, Clone, Default)]
pub struct Report {
    columns: Vec<(&'static str, Value)>,
    attachments: Vec<(&'static str, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn col(mut self, name: &'static str, value: impl Into<Value>) -> Self {
        self.columns.push((name, value.into()));
        self
    }

    pub fn attach(mut self, name: &'static str, value: impl serde::Serialize) -> Self {
        self.attachments
            .push((name, serde_json::to_value(value).unwrap_or(Value::Null)));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.columns
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v)
    }

    pub fn emit<W: Write>(&self, format: OutputFormat, sink: W) -> Result<(), OutputError> {
        match format {
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(sink);
                w.write_record(self.columns.iter().map(|(n, _)| *n))?;
                w.write_record(self.columns.iter().map(|(_, v)| cell(v)))?;
                w.flush()?;
                Ok(())
            }
            OutputFormat::Json => {
                let mut map = Map::new();
                for (name, value) in self.columns.iter().chain(&self.attachments) {
                    map.insert((*name).to_string(), value.clone());
                }
                write_json(sink, &Value::Object(map))
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => sig9(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => v.to_string(),
    }
}
