//! JSON and CSV artifact writers.
//!
//! Floats are written as the shortest decimal that parses back to the same
//! `f64`, in both formats, so equal results give byte-equal files. Non-finite
//! values become `null` in JSON and an empty cell in CSV.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Shortest round-trip decimal; empty for non-finite values.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite floats serialize")
    } else {
        String::new()
    }
}

/// Column-named numeric table.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_owned()).collect(), rows: Vec::new() }
    }

    /// Appends a row; non-finite entries are stored as missing.
    pub fn push(&mut self, row: &[f64]) {
        self.push_opt(row.iter().map(|&x| x.is_finite().then_some(x)).collect());
    }

    pub fn push_opt(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row.into_iter().map(|x| x.filter(|v| v.is_finite())).collect());
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        if self.columns.is_empty() {
            return String::new();
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.map_or_else(String::new, format_float))).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        if text.is_empty() {
            return Ok(Self::default());
        }
        let bad = |e: csv::Error| Error::Config(format!("csv: {e}"));
        let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let mut table = Self::new(&r.headers().map_err(bad)?.iter().collect::<Vec<_>>());
        for (i, record) in r.records().enumerate() {
            let row = record
                .map_err(bad)?
                .iter()
                .map(|cell| match cell {
                    "" => Ok(None),
                    c => c.parse::<f64>().map(Some).map_err(|e| Error::Config(format!("csv line {}: {e}", i + 2))),
                })
                .collect::<Result<Vec<_>>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("cannot create {}: {e}", dir.display()))))
}

/// Writes `value` to `dir/name` as JSON.
pub fn write_json<T: Serialize + ?Sized>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    fs::write(&path, to_json_string(value))?;
    Ok(path)
}

/// Writes `table` to `dir/stem.{json,csv}`.
pub fn emit_table(dir: &Path, stem: &str, table: &Table, format: Format) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let text = match format {
        Format::Json => table.to_json(),
        Format::Csv => table.to_csv(),
    };
    fs::write(&path, text)?;
    Ok(path)
}
