//! CSV tables with a provenance header, written atomically.

use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::config::RunConfig;
use crate::error::CliError;

pub const FORMAT_VERSION: &str = "qtunnel v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// `key=value` pairs for the `# summary:` line.
    pub summary: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new(), summary: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: f64) {
        self.summary.push((key.to_string(), fmt_num(value)));
    }

    pub fn note_text(&mut self, key: &str, value: impl Into<String>) {
        self.summary.push((key.to_string(), value.into()));
    }
}

pub fn fmt_num(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn render(cfg: &RunConfig, table: &Table) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    writeln!(buf, "# {FORMAT_VERSION}, scenario={}, params={}", cfg.scenario, cfg.canonical).unwrap();
    if !table.summary.is_empty() {
        let s: Vec<String> = table.summary.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(buf, "# summary: {}", s.join(";")).unwrap();
    }
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| fmt_num(*v)))?;
    }
    w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a truncated file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
