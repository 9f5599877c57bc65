//! Tabular results and their CSV/JSON encodings.
//!
//! Floats are written with 12 significant digits in scientific notation, so
//! identical inputs give byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "GEOPHASE_OUT_DIR";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => {
                // the rounded value, so JSON and CSV agree digit for digit
                let rounded: f64 = format_float(*x).parse().expect("formatted float parses");
                serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
            }
            Cell::Float(_) | Cell::Empty => Value::Null,
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

/// `{:.11e}`: 12 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        // normalize -0 so reruns that differ only in the sign of zero agree
        let x = if x == 0.0 { 0.0 } else { x };
        format!("{x:.11e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Scalars about the whole run (flags, counts), kept out of the CSV body.
    pub summary: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<String>) -> Self {
        Self {
            command,
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match the header"
        );
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_text))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn to_json(&self) -> Vec<u8> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), v.json()))
            .collect();
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command.into()));
        doc.insert("columns".into(), Value::from(self.columns.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        doc.insert("summary".into(), Value::Object(summary));
        let mut bytes = serde_json::to_vec_pretty(&Value::Object(doc)).expect("json encoding");
        bytes.push(b'\n');
        bytes
    }

    pub fn encode(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Output format: the flag, then the config, then the path extension, then CSV.
pub fn resolve_format(flag: Option<Format>, config: Option<Format>, path: Option<&Path>) -> Format {
    flag.or(config)
        .or_else(|| match path?.extension()?.to_str()? {
            "json" => Some(Format::Json),
            "csv" => Some(Format::Csv),
            _ => None,
        })
        .unwrap_or(Format::Csv)
}

/// Destination file, or `None` for stdout: the flag, then the config path,
/// then `<$GEOPHASE_OUT_DIR>/<command>.<ext>`.
pub fn resolve_path(
    flag: Option<&Path>,
    config: Option<&Path>,
    out_dir: Option<&Path>,
    command: &str,
    format: Format,
) -> Option<PathBuf> {
    flag.or(config)
        .map(Path::to_path_buf)
        .or_else(|| out_dir.map(|d| d.join(format!("{command}.{}", format.extension()))))
}

/// Writes `bytes` to `path`, or stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|source| CliError::Io {
                    path: parent.display().to_string(),
                    source,
                })?;
            }
            std::fs::write(p, bytes).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_twelve_significant_digits() {
        assert_eq!(format_float(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(format_float(-0.0), "0.00000000000e0");
        assert_eq!(format_float(1.0e-300), "1.00000000000e-300");
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(
            "demo",
            vec!["name".into(), "x".into(), "ok".into(), "gap".into()],
        );
        t.push(vec!["a".into(), 0.1.into(), true.into(), Cell::Empty]);
        t.summary.push(("count".into(), Cell::Int(1)));
        let csv = String::from_utf8(t.to_csv()).unwrap();
        assert_eq!(csv, "name,x,ok,gap\na,1.00000000000e-1,true,\n");
        let json: Value = serde_json::from_slice(&t.to_json()).unwrap();
        assert_eq!(json["rows"][0]["x"], Value::from(0.1));
        assert_eq!(json["rows"][0]["gap"], Value::Null);
        assert_eq!(json["summary"]["count"], Value::from(1));
        let keys: Vec<&String> = json["rows"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["name", "x", "ok", "gap"]);
    }

    #[test]
    fn destination_precedence() {
        let dir = Path::new("/tmp/outdir");
        assert_eq!(
            resolve_path(None, None, Some(dir), "gate", Format::Json),
            Some(dir.join("gate.json"))
        );
        assert_eq!(
            resolve_path(
                Some(Path::new("a.csv")),
                Some(Path::new("b.csv")),
                Some(dir),
                "gate",
                Format::Csv
            ),
            Some(PathBuf::from("a.csv"))
        );
        assert_eq!(resolve_path(None, None, None, "gate", Format::Csv), None);
        assert_eq!(
            resolve_format(None, None, Some(Path::new("x.json"))),
            Format::Json
        );
        assert_eq!(
            resolve_format(Some(Format::Csv), Some(Format::Json), None),
            Format::Csv
        );
    }
}
