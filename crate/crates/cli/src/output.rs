//! CSV files with `#`-prefixed metadata lines ahead of the header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub struct CsvOut {
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvOut {
    pub fn create(path: &Path, kind: &str, meta: &[(String, f64)], columns: &[&str]) -> anyhow::Result<Self> {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "# hismhd {VERSION} {kind}")?;
        for (k, v) in meta {
            writeln!(w, "# {k} = {}", num(*v))?;
        }
        let mut writer = csv::Writer::from_writer(w);
        writer.write_record(columns)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> anyhow::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn numbers(&mut self, values: &[f64]) -> anyhow::Result<()> {
        self.row(values.iter().map(|v| num(*v)))
    }

    pub fn flush(&mut self) -> anyhow::Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Writes a whole `name,value` table.
pub fn write_pairs(path: &Path, kind: &str, meta: &[(String, f64)], pairs: &[(String, f64)]) -> anyhow::Result<()> {
    let mut out = CsvOut::create(path, kind, meta, &["name", "value"])?;
    for (k, v) in pairs {
        out.row([k.clone(), num(*v)])?;
    }
    out.flush()
}

/// Reads a CSV written by [`CsvOut`]: header names and numeric rows.
pub fn read_numeric(path: &Path) -> anyhow::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().with_context(|| format!("`{s}` in {} is not a number", path.display())))
            .collect::<anyhow::Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
