//! CSV tables with JSON sidecars, and JSON reports.
//!
//! Floats are written as `{:.16e}` (17 significant digits, round-trips every
//! `f64`). Nothing run-dependent (time, host, thread count) is written, so a
//! rerun with the same config reproduces every byte.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Task;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "vortex-phase-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::F)
    }
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => format_f64(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(name: &str, columns: Vec<String>) -> Self {
        Table {
            name: name.to_string(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in {}", self.name);
        self.rows.push(row);
    }
}

/// Writes every artifact of one run into `dir`.
pub struct Output {
    dir: PathBuf,
    task: Task,
    config_sha256: String,
    warnings: Vec<String>,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path, task: Task, config_sha256: &str, warnings: &[String]) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Output {
            dir: dir.to_path_buf(),
            task,
            config_sha256: config_sha256.to_string(),
            warnings: warnings.to_vec(),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn meta(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "schema_version": SCHEMA_VERSION,
            "task": self.task.name(),
            "config_sha256": self.config_sha256,
            "warnings": self.warnings,
        })
    }

    fn write_bytes(&mut self, file: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(file);
        std::fs::write(&path, bytes).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    /// `<name>.csv` and its sidecar `<name>.meta.json`; `summary` goes into
    /// the sidecar.
    pub fn table(&mut self, table: &Table, summary: Value) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: self.dir.join(&table.name),
            source: e.into_error(),
        })?;
        let file = format!("{}.csv", table.name);
        self.write_bytes(&file, &bytes)?;
        let mut meta = self.meta();
        meta["file"] = json!(file);
        meta["columns"] = json!(table.columns);
        meta["rows"] = json!(table.rows.len());
        meta["summary"] = summary;
        let mut text = serde_json::to_string_pretty(&meta)?;
        text.push('\n');
        self.write_bytes(&format!("{}.meta.json", table.name), text.as_bytes())
    }

    /// `<name>.json` holding `{"meta": …, "report": …}`.
    pub fn report<T: Serialize>(&mut self, name: &str, report: &T) -> Result<()> {
        let v = json!({ "meta": self.meta(), "report": report });
        let mut text = serde_json::to_string_pretty(&v)?;
        text.push('\n');
        self.write_bytes(&format!("{name}.json"), text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for x in [0.1, 1.0 / 3.0, -8.0 * std::f64::consts::PI, 1e-300, 6.02214076e23] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{s}");
        }
    }

    #[test]
    fn table_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Output::new(dir.path(), Task::Branch, "abc", &[]).unwrap();
        let mut t = Table::new("t", &["x", "name", "n"]);
        t.push(vec![0.5.into(), "a".into(), 3usize.into()]);
        t.push(vec![Cell::Empty, "b".into(), 4usize.into()]);
        out.table(&t, json!({"k": 1})).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(csv, "x,name,n\n5.0000000000000000e-1,a,3\n,b,4\n");
        let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.meta.json")).unwrap()).unwrap();
        assert_eq!(meta["schema_version"], 1);
        assert_eq!(meta["config_sha256"], "abc");
        assert_eq!(meta["rows"], 2);
    }
}
