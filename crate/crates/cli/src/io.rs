//! Path resolution against the data root and small file helpers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{csv_error, CliError, Result};

/// Shared context: the optional default data root.
pub struct Ctx {
    pub data_dir: Option<PathBuf>,
}

impl Ctx {
    /// A relative path missing from the working directory is looked up under
    /// the data root.
    pub fn input(&self, p: &Path) -> PathBuf {
        if p.is_relative() && !p.exists() {
            if let Some(candidate) = self.data_dir.as_ref().map(|d| d.join(p)) {
                if candidate.exists() {
                    return candidate;
                }
            }
        }
        p.to_path_buf()
    }

    /// `given`, or `<data root>/<default_name>` when the flag is omitted.
    pub fn input_or_default(&self, given: Option<&Path>, default_name: &str, flag: &str) -> Result<PathBuf> {
        match (given, &self.data_dir) {
            (Some(p), _) => Ok(self.input(p)),
            (None, Some(d)) => Ok(d.join(default_name)),
            (None, None) => Err(CliError::Input(format!("{flag} is required (or set PLFLAB_DATA_DIR)"))),
        }
    }

    pub fn read_to_string(&self, p: &Path) -> Result<String> {
        let path = self.input(p);
        fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn open(&self, p: &Path) -> Result<fs::File> {
        let path = self.input(p);
        fs::File::open(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    s.push('\n');
    write_bytes(path, s.as_bytes())
}

/// Serialize `rows` as CSV with a header (written even when `rows` is empty).
pub fn csv_bytes<T: Serialize>(header: &[&str], rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(|e| csv_error("csv", e))?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_error("csv", e))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// Write to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_bytes(p, bytes),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}
