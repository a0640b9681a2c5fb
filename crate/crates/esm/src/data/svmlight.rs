use std::io::{BufRead, Write};

use esm_core::Label;

use super::{label_from_value, Dataset};
use crate::error::{EsmError, Result};

/// Parses the sparse `label index:value ...` format. Indices are 1-based and
/// strictly increasing within a line; the dimension is the largest index
/// seen and missing entries are zero. Blank lines and `#` comments are
/// skipped.
pub fn parse_svmlight(reader: impl BufRead, remap_labels: bool) -> Result<Dataset> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut dim = 0;
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line.map_err(|e| EsmError::MalformedLine { line: line_no, message: e.to_string() })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let token = tokens.next().unwrap_or_default();
        let value: f64 = token.parse().map_err(|_| EsmError::MalformedLine {
            line: line_no,
            message: format!("bad label '{token}'"),
        })?;
        let label = label_from_value(value, remap_labels)
            .ok_or_else(|| EsmError::UnknownLabel { line: line_no, token: token.to_string() })?;

        let mut entries = Vec::new();
        let mut last = 0;
        for tok in tokens {
            let malformed = || EsmError::MalformedLine { line: line_no, message: format!("bad feature '{tok}'") };
            let (idx, val) = tok.split_once(':').ok_or_else(malformed)?;
            let idx: usize = idx.parse().map_err(|_| malformed())?;
            let val: f64 = val.parse().map_err(|_| malformed())?;
            if idx == 0 || !val.is_finite() {
                return Err(malformed());
            }
            if idx <= last {
                return Err(EsmError::NonMonotoneIndex { line: line_no });
            }
            last = idx;
            entries.push((idx, val));
        }
        dim = dim.max(last);
        rows.push(entries);
        labels.push(label);
    }
    let points = rows
        .into_iter()
        .map(|entries| {
            let mut p = vec![0.0; dim];
            for (idx, val) in entries {
                p[idx - 1] = val;
            }
            p
        })
        .collect();
    Dataset::new(points, labels, dim, "")
}

/// Writes `ds` in the sparse format, omitting zeros. The last feature is
/// always written on the first row so the dimension survives a round trip.
pub fn write_svmlight(ds: &Dataset, mut out: impl Write) -> std::io::Result<()> {
    for (row, (p, l)) in ds.points.iter().zip(&ds.labels).enumerate() {
        out.write_all(if *l == Label::Plus { b"+1" } else { b"-1" })?;
        for (i, v) in p.iter().enumerate() {
            if *v != 0.0 || (row == 0 && i + 1 == ds.feature_dim) {
                write!(out, " {}:{}", i + 1, v)?;
            }
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}
