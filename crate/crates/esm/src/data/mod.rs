//! Labelled datasets and their file formats.

mod dense;
mod scale;
mod split;
mod svmlight;
mod synth;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use esm_core::Label;

pub use dense::parse_csv;
pub use scale::MinMaxScaler;
pub use split::{split_train_test, stratified_folds};
pub use svmlight::{parse_svmlight, write_svmlight};
pub use synth::{make_synthetic, synthetic_centroids, SynthSpec};

use crate::error::{EsmError, Result};

/// Dense points with a `Plus`/`Minus` label each.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub feature_dim: usize,
    pub name: String,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<Label>, feature_dim: usize, name: impl Into<String>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(EsmError::InvalidArgument(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| p.len() != feature_dim) {
            return Err(EsmError::InvalidArgument(format!(
                "point of dimension {} in a {feature_dim}-dimensional dataset",
                p.len()
            )));
        }
        if labels.contains(&Label::Rejected) {
            return Err(EsmError::InvalidArgument("dataset labels must be +1 or -1".into()));
        }
        Ok(Dataset { points, labels, feature_dim, name: name.into() })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points of each class, in dataset order.
    pub fn by_class(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (p, l) in self.points.iter().zip(&self.labels) {
            match l {
                Label::Plus => plus.push(p.clone()),
                _ => minus.push(p.clone()),
            }
        }
        (plus, minus)
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let plus = self.labels.iter().filter(|&&l| l == Label::Plus).count();
        (plus, self.len() - plus)
    }

    /// The rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_dim: self.feature_dim,
            name: self.name.clone(),
        }
    }
}

/// Reads a dataset, choosing the format by extension: `.csv` is dense CSV,
/// anything else the sparse `label index:value` format.
pub fn load_dataset(path: &Path, remap_labels: bool) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| EsmError::io(path, e))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset").to_string();
    let reader = BufReader::new(file);
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let mut ds = if is_csv { parse_csv(reader, remap_labels)? } else { parse_svmlight(reader, remap_labels)? };
    ds.name = name;
    Ok(ds)
}

/// Maps a numeric label token to a class. Without `remap` only `±1` are
/// accepted; with it, `0`/`2` also mean `Minus` and `4` means `Plus`.
pub(crate) fn label_from_value(v: f64, remap: bool) -> Option<Label> {
    match v {
        1.0 => Some(Label::Plus),
        -1.0 => Some(Label::Minus),
        4.0 if remap => Some(Label::Plus),
        0.0 | 2.0 if remap => Some(Label::Minus),
        _ => None,
    }
}
