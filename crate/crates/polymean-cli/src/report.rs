//! Output assembly and rendering: one [`Output`] per invocation, rendered as
//! human-readable text, machine-readable JSON (schema `polymean/1`), or CSV.

use std::fmt::Write as _;

use polymean::Coeff;
use serde::Serialize;
use serde_json::{json, Value};

/// Versioned machine-readable envelope. Every subcommand emits exactly one.
#[derive(Debug, Serialize)]
pub struct Output {
    pub schema: &'static str,
    pub subcommand: &'static str,
    pub inputs: Value,
    pub results: Vec<Value>,
    pub warnings: Vec<String>,
}

impl Output {
    pub fn new(subcommand: &'static str, inputs: Value) -> Output {
        Output {
            schema: "polymean/1",
            subcommand,
            inputs,
            results: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

/// A fully assembled report in all three formats.
pub struct Report {
    pub output: Output,
    pub text: String,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
}

/// Serialize a coefficient losslessly: exact rationals as "p/q" strings,
/// floats as decimal strings (the record carries the precision annotation).
pub fn coeff_value(c: &Coeff) -> Value {
    json!(coeff_string(c))
}

pub fn coeff_string(c: &Coeff) -> String {
    match c {
        Coeff::Exact(r) => r.to_string(),
        Coeff::Approx(a) => a.to_dec_string(),
    }
}

/// Short decimal rendering of any coefficient for text tables.
pub fn coeff_brief(c: &Coeff) -> String {
    match c {
        Coeff::Exact(r) => {
            let s = r.to_string();
            if s.len() <= 24 {
                s
            } else {
                format!("{:.6e}", c.to_f64())
            }
        }
        Coeff::Approx(_) => format!("{:.6e}", c.to_f64()),
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", header.join(","));
    for row in rows {
        let fields: Vec<String> = row.iter().map(|f| csv_escape(f)).collect();
        let _ = writeln!(s, "{}", fields.join(","));
    }
    s
}

/// Render per the requested format and write to the given sink.
pub fn emit(
    format: crate::Format,
    out: Option<&std::path::Path>,
    report: &Report,
) -> Result<(), String> {
    let body = match format {
        crate::Format::Text => report.text.clone(),
        crate::Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.output)
                .map_err(|e| format!("JSON serialization failed: {e}"))?;
            s.push('\n');
            s
        }
        crate::Format::Csv => render_csv(&report.csv_header, &report.csv_rows),
    };
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
