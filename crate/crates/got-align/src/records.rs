//! Line-oriented result records.
//!
//! Every result file starts with `schema_version 1` and `record <kind>`,
//! followed by one field per line: the key, a space, then the value
//! tokens.  Fields keep the order they were written in, so equal runs
//! produce byte-identical files.  Matrices are written as
//! `<key> <rows> <cols> <entries row-major>`; lists as space-separated
//! tokens.  Floating-point values use the shortest decimal form that
//! parses back to the identical bits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use got_core::Mat;

use crate::io::{write_file, IoError};

/// The format revision written to and required from every record file.
pub const SCHEMA_VERSION: &str = "1";

/// An in-memory record: a kind tag plus ordered `(key, value)` fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub kind: String,
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn new(kind: &str) -> Record {
        Record { kind: kind.to_string(), fields: Vec::new() }
    }

    /// Appends a field; keys may repeat (each occurrence is kept).
    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        debug_assert!(!key.contains(char::is_whitespace), "field keys are single tokens");
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    /// Appends a list field as space-separated tokens.
    pub fn push_list<T: ToString>(&mut self, key: &str, values: &[T]) -> &mut Self {
        let joined = values.iter().map(T::to_string).collect::<Vec<_>>().join(" ");
        self.push(key, joined)
    }

    /// Appends a matrix field as `<rows> <cols> <entries row-major>`.
    pub fn push_mat(&mut self, key: &str, m: &Mat) -> &mut Self {
        let mut value = format!("{} {}", m.rows(), m.cols());
        for v in m.as_slice() {
            let _ = write!(value, " {v}");
        }
        self.push(key, value)
    }

    /// First value stored under `key`, if any.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Every value stored under `key`, in order.
    pub fn get_all(&self, key: &str) -> Vec<&str> {
        self.fields.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()).collect()
    }

    /// All fields in order.
    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    fn missing(&self, key: &str) -> IoError {
        IoError::Parse {
            path: PathBuf::new(),
            line: 0,
            message: format!("record '{}' has no field '{key}'", self.kind),
        }
    }

    pub fn f64_field(&self, key: &str) -> Result<f64, IoError> {
        let raw = self.get(key).ok_or_else(|| self.missing(key))?;
        parse_f64(raw, key)
    }

    pub fn usize_field(&self, key: &str) -> Result<usize, IoError> {
        let raw = self.get(key).ok_or_else(|| self.missing(key))?;
        raw.parse().map_err(|_| bad_value(key, raw))
    }

    pub fn str_field(&self, key: &str) -> Result<&str, IoError> {
        self.get(key).ok_or_else(|| self.missing(key))
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, IoError> {
        let raw = self.get(key).ok_or_else(|| self.missing(key))?;
        raw.split_whitespace().map(|t| parse_f64(t, key)).collect()
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, IoError> {
        let raw = self.get(key).ok_or_else(|| self.missing(key))?;
        raw.split_whitespace()
            .map(|t| t.parse().map_err(|_| bad_value(key, t)))
            .collect()
    }

    pub fn mat_field(&self, key: &str) -> Result<Mat, IoError> {
        let raw = self.get(key).ok_or_else(|| self.missing(key))?;
        let mut tokens = raw.split_whitespace();
        let rows: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad_value(key, raw))?;
        let cols: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad_value(key, raw))?;
        let entries: Vec<f64> = tokens
            .map(|t| parse_f64(t, key))
            .collect::<Result<_, _>>()?;
        if entries.len() != rows * cols {
            return Err(bad_value(key, "matrix entry count does not match its shape"));
        }
        Ok(Mat::from_vec(rows, cols, entries))
    }

    /// Serializes the record, always ending with a newline.
    pub fn render(&self) -> String {
        let mut out = format!("schema_version {SCHEMA_VERSION}\nrecord {}\n", self.kind);
        for (key, value) in &self.fields {
            if value.is_empty() {
                let _ = writeln!(out, "{key}");
            } else {
                let _ = writeln!(out, "{key} {value}");
            }
        }
        out
    }

    /// Writes the rendered record to `path`.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), IoError> {
        write_file(path.as_ref(), &self.render())
    }
}

fn bad_value(key: &str, raw: &str) -> IoError {
    IoError::Parse {
        path: PathBuf::new(),
        line: 0,
        message: format!("field '{key}': bad value '{raw}'"),
    }
}

fn parse_f64(token: &str, key: &str) -> Result<f64, IoError> {
    let v: f64 = token.parse().map_err(|_| bad_value(key, token))?;
    if !v.is_finite() {
        return Err(bad_value(key, token));
    }
    Ok(v)
}

/// Reads a record file written by [`Record::write`].
pub fn read_record(path: impl AsRef<Path>) -> Result<Record, IoError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(IoError::MissingFile { path: path.to_path_buf() });
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| IoError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    let parse = |line: usize, message: String| IoError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, line)) if line == format!("schema_version {SCHEMA_VERSION}") => {}
        Some((_, line)) => {
            return Err(parse(1, format!("expected 'schema_version {SCHEMA_VERSION}', got '{line}'")))
        }
        None => return Err(parse(1, "empty record file".into())),
    }
    let kind = match lines.next() {
        Some((_, line)) => line
            .strip_prefix("record ")
            .ok_or_else(|| parse(2, format!("expected 'record <kind>', got '{line}'")))?
            .to_string(),
        None => return Err(parse(2, "missing record kind".into())),
    };

    let mut record = Record::new(&kind);
    for (idx, raw) in lines {
        if raw.is_empty() {
            continue;
        }
        match raw.split_once(' ') {
            Some((key, value)) => record.push(key, value),
            None => record.push(raw, ""),
        };
        let _ = idx;
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn a_record_round_trips_floats_bit_exactly() {
        let dir = tmp();
        let path = dir.path().join("r.txt");
        let values = [0.1 + 0.2, 1e-300, 123456789.123456789, f64::MIN_POSITIVE];
        let mat = Mat::from_rows(&[&[0.3, 1.0 / 3.0], &[2.0_f64.sqrt(), 0.0]]);
        let mut rec = Record::new("alignment");
        rec.push("seed", 7u64);
        rec.push("wasserstein_cost", values[0]);
        rec.push_list("trajectory", &values);
        rec.push_mat("soft", &mat);
        rec.write(&path).unwrap();

        let back = read_record(&path).unwrap();
        assert_eq!(back.kind, "alignment");
        assert_eq!(back.usize_field("seed").unwrap(), 7);
        assert_eq!(back.f64_field("wasserstein_cost").unwrap().to_bits(), values[0].to_bits());
        let traj = back.f64_list("trajectory").unwrap();
        for (a, b) in traj.iter().zip(values.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.mat_field("soft").unwrap(), mat);
    }

    #[test]
    fn schema_version_is_first_and_checked() {
        let dir = tmp();
        let path = dir.path().join("r.txt");
        Record::new("x").write(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("schema_version 1\nrecord x\n"));

        write_file(&path, "schema_version 2\nrecord x\n").unwrap();
        assert!(matches!(read_record(&path).unwrap_err(), IoError::Parse { line: 1, .. }));
    }

    #[test]
    fn repeated_keys_and_empty_values_survive() {
        let dir = tmp();
        let path = dir.path().join("r.txt");
        let mut rec = Record::new("sweep");
        rec.push("row", "0 1 2");
        rec.push("row", "3 4 5");
        rec.push("flag", "");
        rec.write(&path).unwrap();
        let back = read_record(&path).unwrap();
        assert_eq!(back.get_all("row"), vec!["0 1 2", "3 4 5"]);
        assert_eq!(back.get("flag"), Some(""));
    }

    #[test]
    fn field_order_is_exactly_write_order() {
        let mut rec = Record::new("k");
        rec.push("b", 1).push("a", 2).push("c", 3);
        let keys: Vec<&str> = rec.fields().iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, vec!["b", "a", "c"]);
        assert_eq!(rec.render(), "schema_version 1\nrecord k\nb 1\na 2\nc 3\n");
    }
}
