use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, ExitCode};

/// Ordered `key=value` lines. Formatting is fixed so identical inputs give
/// byte-identical reports.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.push("command", command);
        r
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    pub fn push_float(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, float(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Append `status`, `error` (if any) and `exit` lines.
    pub fn finish(&mut self, code: ExitCode, error: Option<&str>) {
        self.push("status", code.status());
        if let Some(e) = error {
            self.push("error", e.replace('\n', " "));
        }
        self.push("exit", code.code());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CliError> {
        write_atomically(path, self.render().as_bytes())
    }
}

/// Residuals and tolerances: four significant digits in scientific notation.
pub fn float(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Write via a sibling temporary file and rename, so readers never observe a
/// partial file.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let err = |source| CliError::Write { path: path.to_path_buf(), source };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(err)?;
    std::fs::rename(&tmp, path).map_err(err)
}
