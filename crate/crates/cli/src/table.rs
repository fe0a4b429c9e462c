use std::path::Path;

use crate::{CliError, Result};

/// Formats a float with 17 significant digits, enough to round-trip.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// An in-memory CSV table. Cells are kept as text exactly as written to
/// disk, so metrics computed from a fresh run and from re-read files agree
/// bit for bit.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::data(self.file_name(), format!("missing column `{name}`")))
    }

    pub fn strs(&self, name: &str) -> Result<Vec<&str>> {
        let c = self.column(name)?;
        Ok(self.rows.iter().map(|r| r[c].as_str()).collect())
    }

    pub fn nums(&self, name: &str) -> Result<Vec<f64>> {
        let c = self.column(name)?;
        self.rows
            .iter()
            .map(|r| {
                r[c].parse::<f64>()
                    .map_err(|_| CliError::data(self.file_name(), format!("`{}` in `{name}` is not a number", r[c])))
            })
            .collect()
    }

    pub fn ints(&self, name: &str) -> Result<Vec<usize>> {
        let c = self.column(name)?;
        self.rows
            .iter()
            .map(|r| {
                r[c].parse::<usize>()
                    .map_err(|_| CliError::data(self.file_name(), format!("`{}` in `{name}` is not an index", r[c])))
            })
            .collect()
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        emit_csv(&dir.join(self.file_name()), &self.header, &self.rows)
    }

    pub fn read(dir: &Path, name: &str) -> Result<Self> {
        let path = dir.join(format!("{name}.csv"));
        let (header, rows) = read_csv(&path)?;
        Ok(Self {
            name: name.to_string(),
            header,
            rows,
        })
    }
}

/// Writes a header row and data rows, comma separated with LF endings.
pub fn emit_csv<S: AsRef<str>>(path: &Path, header: &[S], rows: &[Vec<String>]) -> Result<()> {
    let wrap = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(wrap)?;
    w.write_record(header.iter().map(AsRef::as_ref)).map_err(wrap)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(CliError::data(
                path,
                format!("row has {} cells, header has {}", row.len(), header.len()),
            ));
        }
        w.write_record(row).map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let wrap = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(wrap)?;
    let header = r.headers().map_err(wrap)?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()).map_err(wrap))
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let t = Table::new("empty", &["a", "b"]);
        t.write(dir.path()).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("empty.csv")).unwrap(), "a,b\n");
        assert_eq!(Table::read(dir.path(), "empty").unwrap(), t);
    }

    #[test]
    fn numbers_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let values = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 12345.678901234567];
        let mut t = Table::new("nums", &["label", "x"]);
        for v in values {
            t.push(vec!["p".into(), fmt_num(v)]);
        }
        t.write(dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("nums.csv")).unwrap();
        assert!(!text.contains('\r'));
        let back = Table::read(dir.path(), "nums").unwrap();
        assert_eq!(back.nums("x").unwrap(), values);
        assert!(back.nums("label").is_err());
        assert!(back.nums("y").is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        assert!(emit_csv(&path, &["a", "b"], &[vec!["1".into()]]).is_err());
    }

    #[test]
    fn io_errors_name_the_path() {
        let err = emit_csv(Path::new("/nonexistent-dir/x.csv"), &["a"], &[]).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
