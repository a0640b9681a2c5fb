//! Pieces of the Lagrangian relaxation of the SDP block: slack caps, the
//! closed-form slack minimizers, the multiplier-weighted data matrix and the
//! constraint residuals that serve as dual subgradients.

use alloc::vec;
use alloc::vec::Vec;

use super::pairs::{lift, PairSet};
use crate::geometry::lift_value_unchecked;
use crate::symmat::SymMat;

/// Multipliers of the relaxed constraints: `lambda` per pair, `mu` per
/// plus-point, `xibar` per minus-point.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub xibar: Vec<f64>,
}

impl Multipliers {
    pub fn zeros(ps: &PairSet) -> Self {
        Multipliers {
            lambda: vec![0.0; ps.len()],
            mu: vec![0.0; ps.plus().len()],
            xibar: vec![0.0; ps.minus().len()],
        }
    }

    /// Componentwise `min(·, cap)` with `C1` for pairs and `C2` for points.
    pub fn clipped(&self, c1: f64, c2: f64) -> Multipliers {
        Multipliers {
            lambda: self.lambda.iter().map(|v| v.min(c1)).collect(),
            mu: self.mu.iter().map(|v| v.min(c2)).collect(),
            xibar: self.xibar.iter().map(|v| v.min(c2)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlackBounds {
    pub u_beta: Vec<f64>,
    pub u_nu_plus: Vec<f64>,
    pub u_nu_minus: Vec<f64>,
    /// Norm of the lifted segment midpoint closest to the origin.
    pub r_small: f64,
    /// Largest norm of a lifted training point.
    pub r_big: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slacks {
    pub beta: Vec<f64>,
    pub nu_plus: Vec<f64>,
    pub nu_minus: Vec<f64>,
}

/// Constraint residuals; positive entries are violated constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Violations {
    pub g_lambda: Vec<f64>,
    pub g_mu: Vec<f64>,
    pub g_xibar: Vec<f64>,
}

impl Violations {
    pub fn norm(&self) -> f64 {
        let sq: f64 = self.g_lambda.iter().chain(&self.g_mu).chain(&self.g_xibar).map(|v| v * v).sum();
        libm::sqrt(sq)
    }
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Sphere-based caps on the slacks, with lifted points `(1, x)`:
/// `U_β = ‖x̃_ij‖² − r²` with `r` the smallest lifted midpoint norm, and
/// `U_ν = R² − ‖x̃‖²` with `R` the largest lifted training-point norm.
/// Segment points are taken at `α = 1/2`; negative entries are clipped to 0.
pub fn compute_bounds(ps: &PairSet) -> SlackBounds {
    let mid_sq: Vec<f64> = (0..ps.len()).map(|k| 1.0 + norm_sq(&ps.pair_point_at(k, 0.5))).collect();
    let r_small_sq = mid_sq.iter().copied().fold(f64::INFINITY, f64::min);
    let plus_sq: Vec<f64> = ps.plus().iter().map(|x| 1.0 + norm_sq(x)).collect();
    let minus_sq: Vec<f64> = ps.minus().iter().map(|x| 1.0 + norm_sq(x)).collect();
    let r_big_sq = plus_sq.iter().chain(&minus_sq).copied().fold(0.0, f64::max);
    SlackBounds {
        u_beta: mid_sq.iter().map(|v| (v - r_small_sq).max(0.0)).collect(),
        u_nu_plus: plus_sq.iter().map(|v| (r_big_sq - v).max(0.0)).collect(),
        u_nu_minus: minus_sq.iter().map(|v| (r_big_sq - v).max(0.0)).collect(),
        r_small: libm::sqrt(r_small_sq),
        r_big: libm::sqrt(r_big_sq),
    }
}

/// Minimizes the relaxed Lagrangian over the boxed slacks: each slack sits
/// at 0 when its cost coefficient `C − multiplier` is non-negative and at
/// its cap otherwise.
pub fn relaxed_slack_step(m: &Multipliers, bounds: &SlackBounds, c1: f64, c2: f64) -> Slacks {
    let pick = |coef: f64, cap: f64| if coef < 0.0 { cap } else { 0.0 };
    Slacks {
        beta: m.lambda.iter().zip(&bounds.u_beta).map(|(l, u)| pick(c1 - l, *u)).collect(),
        nu_plus: m.mu.iter().zip(&bounds.u_nu_plus).map(|(l, u)| pick(c2 - l, *u)).collect(),
        nu_minus: m.xibar.iter().zip(&bounds.u_nu_minus).map(|(l, u)| pick(c2 - l, *u)).collect(),
    }
}

/// `A = Σ λ_ij x̃_ij x̃_ijᵀ − Σ μ_i x̃_i⁺x̃_i⁺ᵀ − Σ ξ̄_j x̃_j⁻x̃_j⁻ᵀ`, so that
/// `⟨A, S̃⟩` is the `S̃`-dependent part of the Lagrangian.
pub fn weighted_data_matrix(ps: &PairSet, m: &Multipliers) -> SymMat {
    let mut a = SymMat::zeros(ps.dim() + 1);
    for (k, &w) in m.lambda.iter().enumerate() {
        if w != 0.0 {
            a.add_outer(w, &ps.lifted_pair_point(k));
        }
    }
    for (x, &w) in ps.plus().iter().zip(&m.mu) {
        if w != 0.0 {
            a.add_outer(-w, &lift(x));
        }
    }
    for (x, &w) in ps.minus().iter().zip(&m.xibar) {
        if w != 0.0 {
            a.add_outer(-w, &lift(x));
        }
    }
    a
}

/// `q_ij − 1 − β_ij`, `1 − q_i⁺ − ν_i⁺`, `1 − q_j⁻ − ν_j⁻`.
pub fn dual_violations(lifted: &SymMat, ps: &PairSet, slacks: &Slacks) -> Violations {
    Violations {
        g_lambda: (0..ps.len())
            .map(|k| lift_value_unchecked(lifted, &ps.pair_point(k)) - 1.0 - slacks.beta[k])
            .collect(),
        g_mu: ps
            .plus()
            .iter()
            .zip(&slacks.nu_plus)
            .map(|(x, nu)| 1.0 - lift_value_unchecked(lifted, x) - nu)
            .collect(),
        g_xibar: ps
            .minus()
            .iter()
            .zip(&slacks.nu_minus)
            .map(|(x, nu)| 1.0 - lift_value_unchecked(lifted, x) - nu)
            .collect(),
    }
}
