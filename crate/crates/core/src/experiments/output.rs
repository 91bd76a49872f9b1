use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn opt_str(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `(a, b)` with two decimals, or a bare number for one component.
pub(crate) fn format_vector(v: &[f64]) -> String {
    match v {
        [x] => format!("{x:.2}"),
        _ => format!(
            "({})",
            v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ")
        ),
    }
}
