//! Deterministic text output: every float prints with 12 significant digits
//! so bundles are byte-stable and diffable.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// 12 significant digits, scientific notation, deterministic for all finite
/// inputs (negative zero normalizes to zero).
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000e0".into();
    }
    format!("{x:.11e}")
}

pub struct KvWriter {
    buffer: String,
}

impl KvWriter {
    pub fn new(title: &str) -> Self {
        KvWriter {
            buffer: format!("# {title}\n"),
        }
    }

    pub fn field(&mut self, key: &str, value: impl AsRef<str>) -> &mut Self {
        writeln!(self.buffer, "{key} = {}", value.as_ref()).unwrap();
        self
    }

    pub fn float(&mut self, key: &str, value: f64) -> &mut Self {
        self.field(key, sig12(value))
    }

    pub fn floats(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let joined = values.iter().map(|&v| sig12(v)).collect::<Vec<_>>().join(", ");
        self.field(key, format!("[{joined}]"))
    }

    pub fn blank(&mut self) -> &mut Self {
        self.buffer.push('\n');
        self
    }

    pub fn write_to(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, &self.buffer)
    }

    pub fn into_string(self) -> String {
        self.buffer
    }
}

pub struct CsvWriter {
    buffer: String,
    columns: usize,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        CsvWriter {
            buffer: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) -> &mut Self {
        assert_eq!(cells.len(), self.columns, "csv row width mismatch");
        writeln!(self.buffer, "{}", cells.join(",")).unwrap();
        self
    }

    pub fn float_row(&mut self, cells: &[f64]) -> &mut Self {
        let rendered: Vec<String> = cells.iter().map(|&c| sig12(c)).collect();
        self.row(&rendered)
    }

    pub fn write_to(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, &self.buffer)
    }
}
