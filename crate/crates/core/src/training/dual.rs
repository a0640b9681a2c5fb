use alloc::vec::Vec;

use super::bounds::{
    dual_violations, relaxed_slack_step, weighted_data_matrix, Multipliers, SlackBounds, Violations,
};
use super::exact::exact_primal_solve;
use super::inner::InnerProblem;
use super::pairs::PairSet;
use super::{DualStep, Hyperparams, SdpMode};
use crate::error::{Error, Result};
use crate::geometry::lift_value_unchecked;
use crate::symmat::{frob_sq, trace_inverse, SymMat};

/// Outcome of one SDP block solve at fixed `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpStep {
    pub matrix: SymMat,
    /// Primal objective at `matrix`.
    pub phi: f64,
    /// Best certified dual value; `None` for the exact primal mode.
    pub dual_bound: Option<f64>,
    pub multipliers: Multipliers,
    /// Best-so-far dual value after each ascent iteration.
    pub dual_history: Vec<f64>,
    pub inner_nonconverged: usize,
}

/// Exact value of the SDP block at `lifted`, with every slack at its
/// smallest feasible value.
pub fn primal_objective(lifted: &SymMat, ps: &PairSet, hp: &Hyperparams) -> Result<f64> {
    let n = ps.dim();
    if lifted.dim() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: lifted.dim() });
    }
    let box_size = trace_inverse(&lifted.block(1, n)).map_err(|e| match e {
        Error::SingularMatrix { min_eigenvalue } => Error::SingularF { min_eigenvalue },
        other => other,
    })?;
    let pair_violation: f64 = (0..ps.len())
        .map(|k| (lift_value_unchecked(lifted, &ps.pair_point(k)) - 1.0).max(0.0))
        .sum();
    let inside = |pts: &[Vec<f64>]| -> f64 {
        pts.iter().map(|x| (1.0 - lift_value_unchecked(lifted, x)).max(0.0)).sum()
    };
    let point_violation = inside(ps.plus()) + inside(ps.minus());
    Ok(hp.c1 * pair_violation + hp.c2 * point_violation + hp.c3 * box_size + hp.c4 * frob_sq(lifted))
}

/// Certified lower bound on the SDP block optimum from multipliers `m`.
///
/// The multipliers are first clipped to `[0, C1]` / `[0, C2]`, where the
/// slack terms of the Lagrangian vanish; the remaining minimization over
/// `S̃` is bounded from below through strong convexity at `at`. The result
/// never exceeds [`primal_objective`] at any feasible `S̃`.
pub fn dual_bound(ps: &PairSet, hp: &Hyperparams, m: &Multipliers, at: &SymMat) -> Result<f64> {
    let clipped = m.clipped(hp.c1, hp.c2);
    let constant = -clipped.lambda.iter().sum::<f64>() + clipped.mu.iter().sum::<f64>()
        + clipped.xibar.iter().sum::<f64>();
    let a = weighted_data_matrix(ps, &clipped);
    let lb = InnerProblem::new(&a, hp.c3, hp.c4, hp.eig_floor).lower_bound(at)?;
    Ok(constant + lb)
}

/// Solves the SDP block approximately.
///
/// In [`SdpMode::DualAscent`] this runs `max_bundle_it` projected
/// subgradient steps on the multipliers with steps `s0/√k`,
/// `s0 = 1/(1 + ‖g₁‖)`; each step solves the slack box problem in closed form
/// and the reduced SDP by projected gradient. The iterate with the best dual
/// value is returned. [`DualStep::Adaptive`] replaces the step sequence.
pub fn sdp_step(
    ps: &PairSet,
    bounds: &SlackBounds,
    hp: &Hyperparams,
    warm: Option<&SymMat>,
    warm_multipliers: Option<&Multipliers>,
) -> Result<SdpStep> {
    if hp.sdp_mode == SdpMode::ExactPrimal {
        let start = match warm {
            Some(w) => w.clone(),
            None => InnerProblem::new(&SymMat::zeros(ps.dim() + 1), hp.c3, hp.c4, hp.eig_floor)
                .with_fix_s(hp.fix_s)
                .solve(None, hp.pg_tol, hp.pg_max_it)?
                .matrix,
        };
        let matrix = exact_primal_solve(ps, hp, &start)?;
        let phi = primal_objective(&matrix, ps, hp)?;
        return Ok(SdpStep {
            matrix,
            phi,
            dual_bound: None,
            multipliers: warm_multipliers.cloned().unwrap_or_else(|| Multipliers::zeros(ps)),
            dual_history: Vec::new(),
            inner_nonconverged: 0,
        });
    }

    let mut m = warm_multipliers.cloned().unwrap_or_else(|| Multipliers::zeros(ps));
    let mut current = warm.cloned();
    let mut best: Option<(f64, SymMat, Multipliers, Violations)> = None;
    let mut dual_history = Vec::with_capacity(hp.max_bundle_it);
    let mut inner_nonconverged = 0;
    let mut s0 = 0.0;
    let mut adaptive = 0.0;

    for k in 1..=hp.max_bundle_it {
        let slacks = relaxed_slack_step(&m, bounds, hp.c1, hp.c2);
        let a = weighted_data_matrix(ps, &m);
        let sol = InnerProblem::new(&a, hp.c3, hp.c4, hp.eig_floor)
            .with_fix_s(hp.fix_s)
            .solve(current.as_ref(), hp.pg_tol, hp.pg_max_it)?;
        if !sol.converged {
            inner_nonconverged += 1;
        }
        let value = dual_bound(ps, hp, &m, &sol.matrix)?;
        let g = dual_violations(&sol.matrix, ps, &slacks);
        let improved = best.as_ref().is_none_or(|b| value > b.0);
        if improved {
            best = Some((value, sol.matrix.clone(), m.clone(), g.clone()));
        }
        let best_value = best.as_ref().map_or(value, |b| b.0);
        dual_history.push(best_value);

        if k == 1 {
            s0 = 1.0 / (1.0 + g.norm());
            adaptive = s0;
        }
        let (step, g) = match hp.dual_step {
            DualStep::Diminishing => (s0 / libm::sqrt(k as f64), g),
            DualStep::Adaptive if improved || k == 1 => {
                if k > 1 {
                    adaptive *= 1.5;
                }
                (adaptive, g)
            }
            DualStep::Adaptive => {
                adaptive *= 0.5;
                let b = best.as_ref().expect("best set on first iteration");
                m = b.2.clone();
                (adaptive, b.3.clone())
            }
        };
        let update = |mult: &mut [f64], grad: &[f64]| {
            for (v, d) in mult.iter_mut().zip(grad) {
                *v = (*v + step * d).max(0.0);
            }
        };
        update(&mut m.lambda, &g.g_lambda);
        update(&mut m.mu, &g.g_mu);
        update(&mut m.xibar, &g.g_xibar);
        current = Some(sol.matrix);
    }

    let (value, matrix, multipliers, _) = best.expect("max_bundle_it >= 1");
    let phi = primal_objective(&matrix, ps, hp)?;
    Ok(SdpStep { matrix, phi, dual_bound: Some(value), multipliers, dual_history, inner_nonconverged })
}
