use alloc::vec::Vec;

use super::bounds::{compute_bounds, Multipliers, SlackBounds};
use super::dual::{sdp_step, SdpStep};
use super::pairs::{alpha_step, PairSet};
use super::Hyperparams;
use crate::classifier::TrainedModel;
use crate::error::Result;
use crate::geometry::HomEllipsoid;
use crate::symmat::SymMat;

/// Summary of one SDP block solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpRecord {
    pub phi: f64,
    pub dual_bound: Option<f64>,
    /// `φ − dual`, when a dual value exists.
    pub gap: Option<f64>,
    pub inner_nonconverged: usize,
}

impl SdpRecord {
    fn from_step(step: &SdpStep) -> Self {
        SdpRecord {
            phi: step.phi,
            dual_bound: step.dual_bound,
            gap: step.dual_bound.map(|d| step.phi - d),
            inner_nonconverged: step.inner_nonconverged,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// `φ*` after the initial block solve and after every outer iteration.
    pub phi_history: Vec<f64>,
    pub sdp_steps: Vec<SdpRecord>,
    pub outer_iterations: usize,
    /// False when `max_outer` stopped the loop.
    pub converged: bool,
    pub n_pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutput {
    pub model: TrainedModel,
    pub lifted: HomEllipsoid,
    pub report: TrainReport,
}

/// State of the alternating scheme, exposed so callers can step through the
/// outer iterations one at a time.
#[derive(Debug, Clone)]
pub struct BlockSolver {
    hp: Hyperparams,
    pairs: PairSet,
    bounds: SlackBounds,
    matrix: SymMat,
    multipliers: Multipliers,
    phi_star: f64,
    phi_bar: f64,
    report: TrainReport,
}

impl BlockSolver {
    /// Builds the pairs at `α = 1/2` and solves the first SDP block.
    pub fn new(plus: &[Vec<f64>], minus: &[Vec<f64>], hp: &Hyperparams) -> Result<Self> {
        hp.validate()?;
        let pairs = PairSet::new(plus.to_vec(), minus.to_vec(), hp.max_pairs)?;
        let bounds = compute_bounds(&pairs);
        let step = sdp_step(&pairs, &bounds, hp, None, None)?;
        let report = TrainReport {
            phi_history: alloc::vec![step.phi],
            sdp_steps: alloc::vec![SdpRecord::from_step(&step)],
            outer_iterations: 0,
            converged: false,
            n_pairs: pairs.len(),
        };
        Ok(BlockSolver {
            hp: hp.clone(),
            pairs,
            bounds,
            phi_star: step.phi,
            phi_bar: f64::INFINITY,
            matrix: step.matrix,
            multipliers: step.multipliers,
            report,
        })
    }

    pub fn phi(&self) -> f64 {
        self.phi_star
    }

    pub fn matrix(&self) -> &SymMat {
        &self.matrix
    }

    pub fn pairs(&self) -> &PairSet {
        &self.pairs
    }

    pub fn report(&self) -> &TrainReport {
        &self.report
    }

    /// Outer stop test `|φ* − φ̄| > eps_gs (1 + |φ̄|)`; always true before
    /// the first outer iteration.
    pub fn should_continue(&self) -> bool {
        if self.report.outer_iterations >= self.hp.max_outer {
            return false;
        }
        if !self.phi_bar.is_finite() {
            return true;
        }
        libm::fabs(self.phi_star - self.phi_bar) > self.hp.eps_gs * (1.0 + libm::fabs(self.phi_bar))
    }

    /// `φ̄ ← φ*`, then `r_inner` rounds of `{α step; SDP step}`. Returns the
    /// new `φ*`.
    pub fn outer_iteration(&mut self) -> Result<f64> {
        self.phi_bar = self.phi_star;
        for _ in 0..self.hp.r_inner {
            alpha_step(&self.matrix, &mut self.pairs);
            let step = sdp_step(&self.pairs, &self.bounds, &self.hp, Some(&self.matrix), Some(&self.multipliers))?;
            self.report.sdp_steps.push(SdpRecord::from_step(&step));
            self.matrix = step.matrix;
            self.multipliers = step.multipliers;
            self.phi_star = step.phi;
        }
        self.report.outer_iterations += 1;
        self.report.phi_history.push(self.phi_star);
        Ok(self.phi_star)
    }

    pub fn run(&mut self) -> Result<()> {
        while self.should_continue() {
            self.outer_iteration()?;
        }
        self.report.converged = self.phi_bar.is_finite()
            && libm::fabs(self.phi_star - self.phi_bar) <= self.hp.eps_gs * (1.0 + libm::fabs(self.phi_bar));
        Ok(())
    }

    /// Converts the current `S̃` to centered form and reduces the training
    /// sets. Fails with `EmptyEllipsoid` or `SingularF` when `S̃` does not
    /// describe a proper ellipsoid.
    pub fn finish(self) -> Result<FitOutput> {
        let lifted = HomEllipsoid::new(self.matrix)?;
        let centered = lifted.to_centered()?;
        let model = TrainedModel::from_training(centered, self.pairs.plus(), self.pairs.minus(), self.hp.eps_cls)?;
        Ok(FitOutput { model, lifted, report: self.report })
    }
}

/// Trains a model on the two classes.
pub fn fit(plus: &[Vec<f64>], minus: &[Vec<f64>], hp: &Hyperparams) -> Result<FitOutput> {
    let mut solver = BlockSolver::new(plus, minus, hp)?;
    solver.run()?;
    solver.finish()
}
