//! Three-way decision rule on top of a trained ellipsoid.
//!
//! Training points inside the ellipsoid are dropped, leaving the reduced
//! sets `X̄⁺` and `X̄⁻`. For a query `z`, `n±(z)` counts the reduced points
//! whose segment to `z` crosses the ellipsoid, and
//! `r⁺(z) = n⁻/|X̄⁻| − n⁺/|X̄⁺|`. The query is labelled `Plus` when
//! `r⁺ ≥ ε`, `Minus` when `r⁻ = −r⁺ ≥ ε`, and rejected otherwise.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::CenteredEllipsoid;

pub const DEFAULT_EPS_CLS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Plus,
    Minus,
    Rejected,
}

impl Label {
    /// `+1`, `−1`, or `0` for rejected.
    pub fn as_i8(self) -> i8 {
        match self {
            Label::Plus => 1,
            Label::Minus => -1,
            Label::Rejected => 0,
        }
    }

    /// Class label from a `±1` value.
    pub fn from_sign(v: f64) -> Option<Label> {
        if v == 1.0 {
            Some(Label::Plus)
        } else if v == -1.0 {
            Some(Label::Minus)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassScores {
    pub n_plus: usize,
    pub n_minus: usize,
    pub r_plus: f64,
    pub r_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    /// `None` when the model is degenerate and the scores are undefined.
    pub scores: Option<ClassScores>,
}

impl Prediction {
    pub fn is_degenerate(&self) -> bool {
        self.scores.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSets {
    pub plus: Vec<Vec<f64>>,
    pub minus: Vec<Vec<f64>>,
    pub degenerate: bool,
}

/// Keeps the training points lying outside the ellipsoid.
pub fn reduce_sets(ellipsoid: &CenteredEllipsoid, plus: &[Vec<f64>], minus: &[Vec<f64>]) -> ReducedSets {
    let keep = |pts: &[Vec<f64>]| -> Vec<Vec<f64>> {
        pts.iter().filter(|x| !ellipsoid.contains(x)).cloned().collect()
    };
    let plus = keep(plus);
    let minus = keep(minus);
    let degenerate = plus.is_empty() || minus.is_empty();
    ReducedSets { plus, minus, degenerate }
}

/// `(r⁺, r⁻)` from separation counts and reduced-set sizes.
pub fn rejection_scores(n_plus: usize, n_minus: usize, size_plus: usize, size_minus: usize) -> Result<(f64, f64)> {
    if size_plus == 0 || size_minus == 0 {
        return Err(Error::DegenerateModel);
    }
    let r_plus = n_minus as f64 / size_minus as f64 - n_plus as f64 / size_plus as f64;
    // +0.0 folds a negative zero into positive zero
    Ok((r_plus, -r_plus + 0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    ellipsoid: CenteredEllipsoid,
    xbar_plus: Vec<Vec<f64>>,
    xbar_minus: Vec<Vec<f64>>,
    eps_cls: f64,
    degenerate: bool,
}

impl TrainedModel {
    /// Reduces the training sets against `ellipsoid` and wraps the result.
    pub fn from_training(
        ellipsoid: CenteredEllipsoid,
        plus: &[Vec<f64>],
        minus: &[Vec<f64>],
        eps_cls: f64,
    ) -> Result<Self> {
        check_eps(eps_cls)?;
        check_points(ellipsoid.dim(), plus)?;
        check_points(ellipsoid.dim(), minus)?;
        let reduced = reduce_sets(&ellipsoid, plus, minus);
        Ok(TrainedModel {
            ellipsoid,
            xbar_plus: reduced.plus,
            xbar_minus: reduced.minus,
            eps_cls,
            degenerate: reduced.degenerate,
        })
    }

    /// Reassembles a model from already-reduced sets, e.g. after loading it
    /// from disk. Fails if a reduced point lies inside the ellipsoid.
    pub fn from_parts(
        ellipsoid: CenteredEllipsoid,
        xbar_plus: Vec<Vec<f64>>,
        xbar_minus: Vec<Vec<f64>>,
        eps_cls: f64,
    ) -> Result<Self> {
        check_eps(eps_cls)?;
        check_points(ellipsoid.dim(), &xbar_plus)?;
        check_points(ellipsoid.dim(), &xbar_minus)?;
        if xbar_plus.iter().chain(&xbar_minus).any(|x| ellipsoid.contains(x)) {
            return Err(Error::InvalidArgument("reduced training point lies inside the ellipsoid"));
        }
        let degenerate = xbar_plus.is_empty() || xbar_minus.is_empty();
        Ok(TrainedModel { ellipsoid, xbar_plus, xbar_minus, eps_cls, degenerate })
    }

    pub fn ellipsoid(&self) -> &CenteredEllipsoid {
        &self.ellipsoid
    }

    pub fn xbar_plus(&self) -> &[Vec<f64>] {
        &self.xbar_plus
    }

    pub fn xbar_minus(&self) -> &[Vec<f64>] {
        &self.xbar_minus
    }

    pub fn eps_cls(&self) -> f64 {
        self.eps_cls
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn dim(&self) -> usize {
        self.ellipsoid.dim()
    }

    /// Same model with another classification threshold.
    pub fn with_eps_cls(&self, eps_cls: f64) -> Result<Self> {
        check_eps(eps_cls)?;
        let mut m = self.clone();
        m.eps_cls = eps_cls;
        Ok(m)
    }

    pub fn separation_counts(&self, z: &[f64]) -> Result<ClassScores> {
        check_points(self.dim(), core::slice::from_ref(&z))?;
        if self.degenerate {
            return Err(Error::DegenerateModel);
        }
        let count = |pts: &[Vec<f64>]| pts.iter().filter(|x| self.ellipsoid.segment_intersects(z, x)).count();
        let n_plus = count(&self.xbar_plus);
        let n_minus = count(&self.xbar_minus);
        let (r_plus, r_minus) =
            rejection_scores(n_plus, n_minus, self.xbar_plus.len(), self.xbar_minus.len())?;
        Ok(ClassScores { n_plus, n_minus, r_plus, r_minus })
    }

    pub fn predict_detailed(&self, z: &[f64]) -> Result<Prediction> {
        if self.degenerate {
            check_points(self.dim(), core::slice::from_ref(&z))?;
            return Ok(Prediction { label: Label::Rejected, scores: None });
        }
        let scores = self.separation_counts(z)?;
        let label = if scores.r_plus >= self.eps_cls {
            Label::Plus
        } else if scores.r_minus >= self.eps_cls {
            Label::Minus
        } else {
            Label::Rejected
        };
        Ok(Prediction { label, scores: Some(scores) })
    }

    pub fn predict(&self, z: &[f64]) -> Result<Label> {
        Ok(self.predict_detailed(z)?.label)
    }

    pub fn predict_batch(&self, points: &[Vec<f64>]) -> Result<Vec<Label>> {
        points.iter().map(|z| self.predict(z)).collect()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument("classification threshold must lie in (0, 1]"))
    }
}

fn check_points<P: AsRef<[f64]>>(dim: usize, pts: &[P]) -> Result<()> {
    for p in pts {
        if p.as_ref().len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.as_ref().len() });
        }
    }
    Ok(())
}
