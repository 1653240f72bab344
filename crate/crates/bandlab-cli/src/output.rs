//! Deterministic table emission: CSV with fixed float width, pretty JSON.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), the
//! shortest width that round-trips any `f64`, so reruns of the same
//! configuration produce byte-identical files regardless of platform
//! defaults or thread count.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

/// A single CSV cell; rows are heterogeneous (indices, names, floats).
pub enum Cell {
    U(u64),
    F(f64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::U(v) => v.to_string(),
            Cell::F(v) => fmt_f64(*v),
            Cell::S(v) => v.clone(),
        }
    }
}

/// 17-significant-digit scientific notation, the round-trip-safe width.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV file under construction; `finish` flushes and returns the file
/// name for the run manifest.
pub struct CsvFile {
    writer: BufWriter<File>,
    name: String,
    width: usize,
}

impl CsvFile {
    /// Creates `dir/name` and writes the header line.
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        let path = dir.join(name);
        let file =
            File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut writer = BufWriter::new(file);
        writeln!(writer, "{}", header.join(","))?;
        Ok(CsvFile {
            writer,
            name: name.to_string(),
            width: header.len(),
        })
    }

    /// Appends one data row; the cell count must match the header.
    pub fn row(&mut self, cells: &[Cell]) -> Result<()> {
        anyhow::ensure!(
            cells.len() == self.width,
            "row with {} cells against a {}-column header in {}",
            cells.len(),
            self.width,
            self.name
        );
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        writeln!(self.writer, "{}", line.join(","))?;
        Ok(())
    }

    /// Flushes and returns the file name for the manifest inventory.
    pub fn finish(mut self) -> Result<String> {
        self.writer.flush()?;
        Ok(self.name)
    }
}

/// Writes a pretty-printed JSON document and returns the file name.
pub fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<String> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, value)?;
    writeln!(writer)?;
    writer.flush()?;
    Ok(name.to_string())
}
