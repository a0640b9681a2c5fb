use std::io::Read;

use super::{label_from_value, Dataset};
use crate::error::{EsmError, Result};

/// Reads comma-separated rows `label, x1, ..., xn`. A first row whose label
/// field is not numeric is taken as a header.
pub fn parse_csv(reader: impl Read, remap_labels: bool) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut dim = None;
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let line = k + 1;
        let Some(token) = record.get(0) else { continue };
        let Ok(value) = token.parse::<f64>() else {
            if k == 0 {
                continue;
            }
            return Err(EsmError::MalformedLine { line, message: format!("bad label '{token}'") });
        };
        let label = label_from_value(value, remap_labels)
            .ok_or_else(|| EsmError::UnknownLabel { line, token: token.to_string() })?;
        let point = record
            .iter()
            .skip(1)
            .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| EsmError::MalformedLine { line, message: "non-numeric feature".into() })?;
        match dim {
            None => dim = Some(point.len()),
            Some(d) if d != point.len() => {
                return Err(EsmError::MalformedLine { line, message: format!("expected {d} features") });
            }
            _ => {}
        }
        points.push(point);
        labels.push(label);
    }
    Dataset::new(points, labels, dim.unwrap_or(0), "")
}
