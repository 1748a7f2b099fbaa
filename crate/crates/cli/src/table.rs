//! Plot-ready CSV tables. The first line is `#` followed by a JSON object
//! with the command, the full configuration, the column units and the
//! temperature conversion constant; the second line is the column header.

use std::path::{Path, PathBuf};

use flux_eit::units::KB_OVER_H_GHZ_PER_K;
use serde_json::{json, Value};

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// 17 significant digits, so every f64 survives a text round trip.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct Table {
    /// File stem.
    pub name: String,
    /// Column names with their units.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
    /// Command-specific metadata merged into the header object.
    pub meta: serde_json::Map<String, Value>,
}

impl Table {
    pub fn new<A: Into<String>, B: Into<String>>(name: &str, columns: impl IntoIterator<Item = (A, B)>) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.into_iter().map(|(c, u)| (c.into(), u.into())).collect(),
            rows: Vec::new(),
            meta: serde_json::Map::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: Value) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header of {}", self.name);
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(c, _)| c == name)
    }

    /// Numeric values of one column; text cells read as NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| if let Cell::Num(x) = r[k] { x } else { f64::NAN }).collect())
    }

    pub fn header_json(&self) -> Value {
        let mut m = self.meta.clone();
        m.insert("columns".into(), json!(self.columns.iter().map(|(c, _)| c).collect::<Vec<_>>()));
        m.insert("units".into(), Value::Object(self.columns.iter().map(|(c, u)| (c.clone(), json!(u))).collect()));
        m.insert("kb_over_h_GHz_per_K".into(), json!(KB_OVER_H_GHZ_PER_K));
        Value::Object(m)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = format!("# {}\n", self.header_json()).into_bytes();
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(self.columns.iter().map(|(c, _)| c)).expect("write to memory");
        for row in &self.rows {
            let cells = row.iter().map(|c| match c {
                Cell::Num(x) => fmt_num(*x),
                Cell::Text(s) => s.clone(),
            });
            w.write_record(cells).expect("write to memory");
        }
        drop(w);
        out
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let io = |path: &Path, e: std::io::Error| CliError::Io { path: path.display().to_string(), message: e.to_string() };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let path = dir.join(format!("{}.csv", self.name));
        std::fs::write(&path, self.to_bytes()).map_err(|e| io(&path, e))?;
        Ok(path)
    }
}

/// The JSON metadata object of a CSV written by [`Table::to_bytes`].
pub fn read_metadata(text: &str) -> Option<Value> {
    let first = text.lines().next()?.strip_prefix("# ")?;
    serde_json::from_str(first).ok()
}
