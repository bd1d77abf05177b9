//! CSV with a commented header block and an optional commented footer.
//!
//! Floats use the shortest representation that parses back to the same
//! value; undefined values are empty fields.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        String::new()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub preamble: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), ..Self::default() }
    }

    pub fn echo(&mut self, key: &str, value: impl Into<String>) {
        self.preamble.push((key.to_string(), value.into()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        for (k, v) in &self.preamble {
            writeln!(buf, "# {k} = {v}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        for line in &self.footer {
            writeln!(buf, "# {line}")?;
        }
        Ok(buf)
    }

    /// Write to `path`, or to stdout when there is none.
    pub fn write(&self, path: Option<&Path>) -> Result<()> {
        let bytes = self.to_bytes()?;
        match path {
            Some(p) => std::fs::write(p, bytes)?,
            None => std::io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    }
}

/// A parsed CSV written by [`Table`]: comment lines are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ReadTable {
    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
        let columns = r.headers()?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { columns, rows })
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Column values; empty fields become NaN so they break plotted lines.
    pub fn floats(&self, col: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.get(col).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN)).collect()
    }
}
