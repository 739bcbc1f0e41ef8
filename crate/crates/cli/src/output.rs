//! CSV tables and the JSON summary.
//!
//! Floats are written in shortest round-trip form so that identical runs
//! produce identical bytes and diffs between runs are exact.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub fn num(x: f64) -> String {
    ryu::Buffer::new().format(x).to_string()
}

pub fn cjson(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// A CSV file: header and pre-formatted rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Self {
            file: file.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| num(x)).collect());
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(dir.join(&self.file))
            .map_err(|e| CliError::Output(e.to_string()))?;
        w.write_record(&self.header).map_err(|e| CliError::Output(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| CliError::Output(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Everything one scenario run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub derived: Map<String, Value>,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn summary(&self, scenario: &str, input: Value) -> Value {
        json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "scenario": scenario,
            "input": input,
            "derived": self.derived,
            "results": self.results,
            "files": self.tables.iter().map(|t| t.file.clone()).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Flattens nested objects into dotted keys; arrays are kept as JSON text.
pub fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => {
            let text = match n.as_f64() {
                Some(x) if n.is_f64() => num(x),
                _ => n.to_string(),
            };
            out.push((prefix.to_string(), text))
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Array(_) => out.push((prefix.to_string(), value.to_string())),
    }
}
