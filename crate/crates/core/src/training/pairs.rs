use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::symmat::SymMat;

/// Training points of both classes and the `(i, j)` segments between them,
/// each with its position `α_ij ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSet {
    dim: usize,
    plus: Vec<Vec<f64>>,
    minus: Vec<Vec<f64>>,
    pairs: Vec<(usize, usize)>,
    alpha: Vec<f64>,
}

/// All pairs in row-major order (`i` outer, `j` inner), `α = 1/2`.
pub fn build_pairs(plus: &[Vec<f64>], minus: &[Vec<f64>]) -> Result<PairSet> {
    PairSet::new(plus.to_vec(), minus.to_vec(), None)
}

impl PairSet {
    /// With `max_pairs`, keeps every `⌈|P| / max_pairs⌉`-th pair.
    pub fn new(plus: Vec<Vec<f64>>, minus: Vec<Vec<f64>>, max_pairs: Option<usize>) -> Result<Self> {
        if plus.is_empty() || minus.is_empty() {
            return Err(Error::EmptyClass);
        }
        let dim = plus[0].len();
        if dim == 0 {
            return Err(Error::InvalidArgument("points need at least one feature"));
        }
        for p in plus.iter().chain(&minus) {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("points must be finite"));
            }
        }
        let total = plus.len() * minus.len();
        let stride = match max_pairs {
            Some(cap) if cap < total => total.div_ceil(cap),
            _ => 1,
        };
        let pairs: Vec<(usize, usize)> = (0..total)
            .step_by(stride)
            .map(|k| (k / minus.len(), k % minus.len()))
            .collect();
        let alpha = vec![0.5; pairs.len()];
        Ok(PairSet { dim, plus, minus, pairs, alpha })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn plus(&self) -> &[Vec<f64>] {
        &self.plus
    }

    pub fn minus(&self) -> &[Vec<f64>] {
        &self.minus
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn set_alpha(&mut self, k: usize, alpha: f64) {
        self.alpha[k] = alpha.clamp(0.0, 1.0);
    }

    /// `x_ij = α x⁺_i + (1 − α) x⁻_j` at an explicit `α`.
    pub fn pair_point_at(&self, k: usize, alpha: f64) -> Vec<f64> {
        let (i, j) = self.pairs[k];
        self.plus[i].iter().zip(&self.minus[j]).map(|(p, m)| alpha * p + (1.0 - alpha) * m).collect()
    }

    pub fn pair_point(&self, k: usize) -> Vec<f64> {
        self.pair_point_at(k, self.alpha[k])
    }

    /// `(1, x_ij)` at the current `α`.
    pub fn lifted_pair_point(&self, k: usize) -> Vec<f64> {
        lift(&self.pair_point(k))
    }
}

pub(crate) fn lift(x: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(x.len() + 1);
    v.push(1.0);
    v.extend_from_slice(x);
    v
}

/// Moves every `α_ij` to the minimizer over `[0, 1]` of
/// `q_ij(α) = (1, αx⁺ + (1−α)x⁻)ᵀ S̃ (1, αx⁺ + (1−α)x⁻)` and returns the
/// implied violations `β_ij = max(0, q_ij − 1)`.
pub fn alpha_step(lifted: &SymMat, ps: &mut PairSet) -> Vec<f64> {
    let n = ps.dim;
    assert_eq!(lifted.dim(), n + 1);
    let mut beta = Vec::with_capacity(ps.len());
    let mut base = vec![0.0; n + 1];
    let mut dir = vec![0.0; n + 1];
    for k in 0..ps.pairs.len() {
        let (i, j) = ps.pairs[k];
        let (xp, xm) = (&ps.plus[i], &ps.minus[j]);
        base[0] = 1.0;
        dir[0] = 0.0;
        for r in 0..n {
            base[r + 1] = xm[r];
            dir[r + 1] = xp[r] - xm[r];
        }
        // q(α) = c + 2bα + aα², starting from the minus endpoint
        let s_base = lifted.mat_vec(&base);
        let c: f64 = base.iter().zip(&s_base).map(|(x, y)| x * y).sum();
        let b: f64 = dir.iter().zip(&s_base).map(|(x, y)| x * y).sum();
        let a = lifted.quad_form(&dir);
        let alpha = if a > 0.0 {
            (-b / a).clamp(0.0, 1.0)
        } else if b > 0.0 {
            0.0
        } else if b < 0.0 {
            1.0
        } else {
            ps.alpha[k]
        };
        ps.alpha[k] = alpha;
        let q = (a * alpha + 2.0 * b) * alpha + c;
        beta.push((q - 1.0).max(0.0));
    }
    beta
}
