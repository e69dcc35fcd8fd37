//! Result tables and their CSV / JSON encodings.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum MetaValue {
    Str(String),
    Int(u64),
    Real(f64),
    List(Vec<f64>),
}

impl MetaValue {
    fn to_text(&self) -> String {
        match self {
            Self::Str(s) => s.clone(),
            Self::Int(n) => n.to_string(),
            Self::Real(x) => x.to_string(),
            Self::List(xs) => xs.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
        }
    }

    fn to_json(&self) -> Value {
        let num = |x: f64| Number::from_f64(x).map_or(Value::Null, Value::Number);
        match self {
            Self::Str(s) => Value::String(s.clone()),
            Self::Int(n) => Value::Number((*n).into()),
            Self::Real(x) => num(*x),
            Self::List(xs) => Value::Array(xs.iter().map(|&x| num(x)).collect()),
        }
    }
}

impl From<&str> for MetaValue {
    fn from(s: &str) -> Self {
        Self::Str(s.to_string())
    }
}

impl From<String> for MetaValue {
    fn from(s: String) -> Self {
        Self::Str(s)
    }
}

impl From<u64> for MetaValue {
    fn from(n: u64) -> Self {
        Self::Int(n)
    }
}

impl From<f64> for MetaValue {
    fn from(x: f64) -> Self {
        Self::Real(x)
    }
}

/// Named real columns plus ordered metadata. Every row has one finite value per column.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    metadata: Vec<(String, MetaValue)>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl Into<MetaValue>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(CliError::RowLength {
                expected: self.columns.len(),
                got: row.len(),
            });
        }
        if let Some(i) = row.iter().position(|x| !x.is_finite()) {
            return Err(CliError::NonFinite(self.columns[i].clone()));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn metadata(&self) -> &[(String, MetaValue)] {
        &self.metadata
    }

    pub fn meta(&self, key: &str) -> Option<&MetaValue> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

/// CSV: `# key: value` lines, a header, then one line per row. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn to_csv(table: &ResultTable) -> String {
    let mut out = String::new();
    for (k, v) in &table.metadata {
        let _ = writeln!(out, "# {k}: {}", v.to_text());
    }
    let _ = writeln!(out, "{}", table.columns.join(","));
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

/// JSON: `{"metadata": {...}, "rows": [{column: value, ...}, ...]}`.
pub fn to_json(table: &ResultTable) -> String {
    let metadata: Map<String, Value> = table
        .metadata
        .iter()
        .map(|(k, v)| (k.clone(), v.to_json()))
        .collect();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table
                .columns
                .iter()
                .zip(row)
                .map(|(c, &x)| {
                    (
                        c.clone(),
                        Number::from_f64(x).map_or(Value::Null, Value::Number),
                    )
                })
                .collect();
            Value::Object(obj)
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("metadata".into(), Value::Object(metadata));
    doc.insert("rows".into(), Value::Array(rows));
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json encoding");
    text.push('\n');
    text
}

pub fn render(table: &ResultTable, format: Format) -> String {
    match format {
        Format::Csv => to_csv(table),
        Format::Json => to_json(table),
    }
}

pub fn emit_table(table: &ResultTable, format: Format, destination: &Destination) -> Result<()> {
    let text = render(table, format);
    match destination {
        Destination::Stdout => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(CliError::Stdout)
        }
        Destination::File(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
    }
}
