use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::models::Dataset;

/// Reads one numeric column from a CSV file.
///
/// A header row is optional. With `column` set the first row must be a header
/// naming it; otherwise a first row whose leading field is not numeric is
/// taken as a header, and the first column is read.
pub fn ingest_csv(path: &Path, column: Option<&str>) -> Result<Dataset> {
    let rows = read_column(path, column)?;
    Dataset::new(rows.into_iter().map(|(_, v)| v).collect(), path.display().to_string())
}

/// [`ingest_csv`] for positive-support models: every value must be `> 0`.
pub fn ingest_csv_positive(path: &Path, column: Option<&str>) -> Result<Dataset> {
    let rows = read_column(path, column)?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|(_, v)| *v <= 0.0)
        .map(|(line, _)| line.to_string())
        .collect();
    if !bad.is_empty() {
        return Err(ingest_err(
            path,
            format!("non-positive values on line(s) {}", bad.join(", ")),
        ));
    }
    Dataset::new(rows.into_iter().map(|(_, v)| v).collect(), path.display().to_string())
}

fn ingest_err(path: &Path, message: String) -> Error {
    Error::Ingest {
        path: path.to_path_buf(),
        message,
    }
}

fn read_column(path: &Path, column: Option<&str>) -> Result<Vec<(u64, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim().is_empty() {
        return Err(ingest_err(path, "empty file".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut index = 0;
    let mut header_seen = false;
    let mut values = Vec::new();
    let mut problems = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 {
            match column {
                Some(name) => {
                    index = record.iter().position(|h| h == name).ok_or_else(|| {
                        ingest_err(path, format!("column `{name}` not found in header"))
                    })?;
                    header_seen = true;
                    continue;
                }
                None => {
                    if record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
                        header_seen = true;
                        continue;
                    }
                }
            }
        }
        match record.get(index) {
            None | Some("") => problems.push(format!("line {line}: missing value")),
            Some(field) => match field.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push((line, v)),
                Ok(_) => problems.push(format!("line {line}: non-finite value `{field}`")),
                Err(_) => problems.push(format!("line {line}: non-numeric value `{field}`")),
            },
        }
    }
    if !problems.is_empty() {
        return Err(ingest_err(path, problems.join("; ")));
    }
    if values.is_empty() {
        let what = if header_seen { "header only, no data rows" } else { "no data rows" };
        return Err(ingest_err(path, what.into()));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn single_column() {
        let f = file("1.0\n2.0\n");
        let d = ingest_csv(f.path(), None).unwrap();
        assert_eq!(d.values, vec![1.0, 2.0]);
        assert_eq!(d.source, f.path().display().to_string());
    }

    #[test]
    fn named_column() {
        let f = file("time\n1.5\n");
        assert_eq!(ingest_csv(f.path(), Some("time")).unwrap().values, vec![1.5]);
        let f = file("id,time\n1,0.5\n2,0.25\n");
        assert_eq!(ingest_csv(f.path(), Some("time")).unwrap().values, vec![0.5, 0.25]);
        assert!(ingest_csv(f.path(), Some("depth")).is_err());
        // Unnamed: header skipped, first column read.
        assert_eq!(ingest_csv(f.path(), None).unwrap().values, vec![1.0, 2.0]);
    }

    #[test]
    fn bad_cells_name_their_lines() {
        let f = file("1.0\n2.0\nabc\n");
        let msg = ingest_csv(f.path(), None).unwrap_err().to_string();
        assert!(msg.contains("line 3"), "{msg}");
        let f = file("a,b\n1,2\n3,\n4,x\n");
        let msg = ingest_csv(f.path(), Some("b")).unwrap_err().to_string();
        assert!(msg.contains("line 3: missing") && msg.contains("line 4: non-numeric"), "{msg}");
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(ingest_csv(file("").path(), None), Err(Error::Ingest { .. })));
        assert!(matches!(ingest_csv(file("x\n").path(), None), Err(Error::Ingest { .. })));
        assert!(matches!(
            ingest_csv(Path::new("/nonexistent/data.csv"), None),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn positivity_lists_rows() {
        let f = file("v\n1\n0\n2\n-3\n");
        let msg = ingest_csv_positive(f.path(), None).unwrap_err().to_string();
        assert!(msg.contains("line(s) 3, 5"), "{msg}");
        assert_eq!(ingest_csv(f.path(), None).unwrap().n(), 4);
    }
}
