//! Machine-readable output: JSON with reals at 15 significant digits
//! (non-finite values become `null`) and a flat CSV view.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use leakdpt::diqkd::format_real;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Real number for JSON: 15 significant digits, `null` if not finite.
fn json_real(v: f64) -> String {
    if v.is_finite() {
        format_real(v)
    } else {
        "null".into()
    }
}

fn number(n: &serde_json::Number) -> String {
    if let Some(i) = n.as_i64() {
        i.to_string()
    } else if let Some(u) = n.as_u64() {
        u.to_string()
    } else {
        json_real(n.as_f64().unwrap_or(f64::NAN))
    }
}

fn write_json(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&number(n)),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            // Arrays of scalars stay on one line.
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_json(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}]", pad(indent));
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String(k.clone()));
                write_json(x, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}}}", pad(indent));
        }
    }
}

pub fn to_json(v: &Value) -> String {
    let mut s = String::new();
    write_json(v, 0, &mut s);
    s.push('\n');
    s
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::Null => String::new(),
        Value::Number(n) => {
            let s = number(n);
            if s == "null" {
                String::new()
            } else {
                s
            }
        }
        Value::String(s) => s.clone(),
        other => {
            let mut s = String::new();
            write_json(other, 0, &mut s);
            s.replace('\n', " ")
        }
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

/// Arrays of objects become a table with the first object's keys as header;
/// objects become `key,value` lines; scalars a single line.
pub fn to_csv(v: &Value) -> String {
    let mut s = String::new();
    match v {
        Value::Array(rows) if rows.iter().all(Value::is_object) && !rows.is_empty() => {
            let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
            let _ = writeln!(s, "{}", keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","));
            for r in rows {
                let o = r.as_object().unwrap();
                let cells: Vec<String> = keys
                    .iter()
                    .map(|k| csv_cell(o.get(*k).unwrap_or(&Value::Null)))
                    .collect();
                let _ = writeln!(s, "{}", cells.join(","));
            }
        }
        Value::Object(map) => {
            s.push_str("key,value\n");
            for (k, x) in map {
                let _ = writeln!(s, "{},{}", k, csv_cell(x));
            }
        }
        other => {
            let _ = writeln!(s, "{}", csv_cell(other));
        }
    }
    s
}

/// Writes to `out` if given, else to standard output.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
