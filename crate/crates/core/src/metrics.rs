//! Scores for classifiers that may reject.
//!
//! With `ρ ∈ [0, 0.5)` the cost charged per rejected point, the accuracy with
//! rejection is `AR = (|well classified| − ρ·|rejected|) / |all|`.

use crate::classifier::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionScores {
    /// Accuracy with rejection.
    pub ar: f64,
    /// Accuracy on the classified points; `None` when everything was rejected.
    pub acc: Option<f64>,
    pub wc: f64,
    pub mc: f64,
    pub rej: f64,
    pub n_wc: usize,
    pub n_mc: usize,
    pub n_rej: usize,
    pub total: usize,
    pub rho: f64,
}

/// Scores predicted labels against the true `Plus`/`Minus` labels.
pub fn score(truth: &[Label], predicted: &[Label], rho: f64) -> Result<RejectionScores> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch { left: truth.len(), right: predicted.len() });
    }
    if truth.is_empty() {
        return Err(Error::InvalidArgument("cannot score an empty prediction set"));
    }
    if !(0.0..0.5).contains(&rho) {
        return Err(Error::InvalidArgument("rejection cost must lie in [0, 0.5)"));
    }
    let (mut n_wc, mut n_mc, mut n_rej) = (0usize, 0usize, 0usize);
    for (&t, &p) in truth.iter().zip(predicted) {
        if t == Label::Rejected {
            return Err(Error::InvalidArgument("true labels must be Plus or Minus"));
        }
        match p {
            Label::Rejected => n_rej += 1,
            p if p == t => n_wc += 1,
            _ => n_mc += 1,
        }
    }
    let total = truth.len();
    let n = total as f64;
    let classified = n_wc + n_mc;
    Ok(RejectionScores {
        ar: (n_wc as f64 - rho * n_rej as f64) / n,
        acc: (classified > 0).then(|| n_wc as f64 / classified as f64),
        wc: n_wc as f64 / n,
        mc: n_mc as f64 / n,
        rej: n_rej as f64 / n,
        n_wc,
        n_mc,
        n_rej,
        total,
        rho,
    })
}
