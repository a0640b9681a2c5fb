//! Training: a block-coordinate scheme alternating between the segment
//! positions `α` (closed form per pair) and the lifted ellipsoid `S̃`
//! (a small SDP solved approximately by Lagrangian dual ascent).
//!
//! The training objective at fixed `α` is
//!
//! ```text
//! φ(S̃) = C1 Σ_ij max(0, q_ij − 1)
//!      + C2 (Σ_i max(0, 1 − q_i⁺) + Σ_j max(0, 1 − q_j⁻))
//!      + C3 tr(F⁻¹) + C4 ‖S̃‖_F²
//! ```
//!
//! where `q` is the lifted quadratic `(1, x)ᵀ S̃ (1, x)` evaluated at the
//! segment points `x_ij` and at the training points themselves.

mod bounds;
mod dual;
mod exact;
mod fit;
mod inner;
mod pairs;

pub use bounds::{
    compute_bounds, dual_violations, relaxed_slack_step, weighted_data_matrix, Multipliers, SlackBounds, Slacks,
    Violations,
};
pub use dual::{dual_bound, primal_objective, sdp_step, SdpStep};
pub use exact::exact_primal_solve;
pub use fit::{fit, BlockSolver, FitOutput, SdpRecord, TrainReport};
pub use inner::{InnerProblem, InnerSolution};
pub use pairs::{alpha_step, build_pairs, PairSet};

use crate::error::{Error, Result};

/// How the SDP block is solved at fixed `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpMode {
    /// Projected subgradient ascent on the Lagrangian dual, capped at
    /// `max_bundle_it` iterations.
    DualAscent,
    /// Direct minimization of the primal objective over the PSD cone,
    /// warm-started and monotone. Slow; meant for small instances.
    ExactPrimal,
}

/// Step rule of the dual ascent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualStep {
    /// `s0/√k` with `s0 = 1/(1 + ‖g₁‖)`.
    Diminishing,
    /// Starts at the same `s0`; grows by 1.5 after an improving step, and
    /// otherwise halves and restarts from the best multipliers. Robust when
    /// the dual is badly scaled (small `C4`, unscaled features).
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    /// Weight on segment-point violations.
    pub c1: f64,
    /// Weight on training points falling inside.
    pub c2: f64,
    /// Weight on the box-size `tr(F⁻¹)`.
    pub c3: f64,
    /// Weight on `‖S̃‖_F²`.
    pub c4: f64,
    /// Relative stop tolerance of the outer loop.
    pub eps_gs: f64,
    /// `(α, S̃)` alternations per outer iteration.
    pub r_inner: usize,
    /// Dual ascent iterations per SDP block.
    pub max_bundle_it: usize,
    pub eps_cls: f64,
    pub max_outer: usize,
    pub pg_tol: f64,
    pub pg_max_it: usize,
    /// Spectral floor imposed on `S̃`.
    pub eig_floor: f64,
    /// Pin the top-left entry of `S̃` to 1.
    pub fix_s: bool,
    /// Cap on the number of segment pairs (stride subsampling).
    pub max_pairs: Option<usize>,
    pub sdp_mode: SdpMode,
    pub dual_step: DualStep,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            c1: 0.01,
            c2: 0.1,
            c3: 0.1,
            c4: 10.0,
            eps_gs: 0.1,
            r_inner: 2,
            max_bundle_it: 30,
            eps_cls: crate::classifier::DEFAULT_EPS_CLS,
            max_outer: 50,
            pg_tol: 1e-8,
            pg_max_it: 2000,
            eig_floor: 1e-8,
            fix_s: false,
            max_pairs: None,
            sdp_mode: SdpMode::DualAscent,
            dual_step: DualStep::Diminishing,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(self.c1) && positive(self.c2) && positive(self.c3) && positive(self.c4)) {
            return Err(Error::InvalidHyperparams("C1..C4 must be positive"));
        }
        if !positive(self.eps_gs) && self.eps_gs != 0.0 {
            return Err(Error::InvalidHyperparams("eps_gs must be non-negative"));
        }
        if self.r_inner == 0 {
            return Err(Error::InvalidHyperparams("r_inner must be at least 1"));
        }
        if self.max_bundle_it == 0 {
            return Err(Error::InvalidHyperparams("max_bundle_it must be at least 1"));
        }
        if !(self.eps_cls > 0.0 && self.eps_cls <= 1.0) {
            return Err(Error::InvalidHyperparams("eps_cls must lie in (0, 1]"));
        }
        if !positive(self.pg_tol) || self.pg_max_it == 0 {
            return Err(Error::InvalidHyperparams("inner solver tolerances must be positive"));
        }
        if !positive(self.eig_floor) {
            return Err(Error::InvalidHyperparams("eig_floor must be positive"));
        }
        if self.max_pairs == Some(0) {
            return Err(Error::InvalidHyperparams("max_pairs must be at least 1"));
        }
        Ok(())
    }
}
