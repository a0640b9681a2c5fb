//! Direct minimization of the SDP block objective.
//!
//! The hinge terms are replaced by Huber smoothings with width `τ`, and `τ`
//! is decreased geometrically; each stage runs projected gradient with
//! Armijo backtracking. The best iterate under the exact objective is kept,
//! starting from the warm start, so the result never does worse than it.

use alloc::vec::Vec;

use super::dual::primal_objective;
use super::pairs::{lift, PairSet};
use super::Hyperparams;
use crate::error::Result;
use crate::symmat::{eig_sym, project_psd, SymMat, TOL_PD};

const TAU_START: f64 = 1e-1;
const TAU_END: f64 = 1e-7;
const TAU_SHRINK: f64 = 0.1;
const ARMIJO_SHRINK: f64 = 0.5;
const ARMIJO_SUFFICIENT: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

fn huber(u: f64, tau: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u <= tau {
        u * u / (2.0 * tau)
    } else {
        u - tau / 2.0
    }
}

fn huber_slope(u: f64, tau: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u <= tau {
        u / tau
    } else {
        1.0
    }
}

struct Smoothed<'a> {
    ps: &'a PairSet,
    hp: &'a Hyperparams,
    lifted_pairs: Vec<Vec<f64>>,
    lifted_points: Vec<Vec<f64>>,
}

impl Smoothed<'_> {
    fn value(&self, x: &SymMat, tau: f64) -> f64 {
        let n = self.ps.dim();
        let eig = match eig_sym(&x.block(1, n)) {
            Ok(e) if e.min_value() > TOL_PD => e,
            _ => return f64::INFINITY,
        };
        let box_size: f64 = eig.values().iter().map(|w| 1.0 / w).sum();
        let pairs: f64 = self.lifted_pairs.iter().map(|v| huber(x.quad_form(v) - 1.0, tau)).sum();
        let points: f64 = self.lifted_points.iter().map(|v| huber(1.0 - x.quad_form(v), tau)).sum();
        self.hp.c1 * pairs + self.hp.c2 * points + self.hp.c3 * box_size + self.hp.c4 * x.dot(x)
    }

    fn gradient(&self, x: &SymMat, tau: f64) -> Result<SymMat> {
        let n = self.ps.dim();
        let mut g = x.scaled(2.0 * self.hp.c4);
        for v in &self.lifted_pairs {
            let w = huber_slope(x.quad_form(v) - 1.0, tau);
            if w != 0.0 {
                g.add_outer(self.hp.c1 * w, v);
            }
        }
        for v in &self.lifted_points {
            let w = huber_slope(1.0 - x.quad_form(v), tau);
            if w != 0.0 {
                g.add_outer(-self.hp.c2 * w, v);
            }
        }
        let inv_sq = eig_sym(&x.block(1, n))?.map_spectrum(|w| -1.0 / (w * w));
        for i in 0..n {
            for j in i..n {
                g.set(i + 1, j + 1, g.get(i + 1, j + 1) + self.hp.c3 * inv_sq.get(i, j));
            }
        }
        Ok(g)
    }

    fn project(&self, x: &SymMat) -> Result<SymMat> {
        let mut y = project_psd(x, self.hp.eig_floor)?;
        if self.hp.fix_s {
            for _ in 0..50 {
                y.set(0, 0, 1.0);
                y = project_psd(&y, self.hp.eig_floor)?;
            }
        }
        Ok(y)
    }
}

/// Minimizes the exact SDP block objective at the current `α`, starting from
/// `warm`. The returned matrix has an objective no larger than `warm`'s
/// (after projection onto the feasible set).
pub fn exact_primal_solve(ps: &PairSet, hp: &Hyperparams, warm: &SymMat) -> Result<SymMat> {
    let problem = Smoothed {
        ps,
        hp,
        lifted_pairs: (0..ps.len()).map(|k| ps.lifted_pair_point(k)).collect(),
        lifted_points: ps.plus().iter().chain(ps.minus()).map(|x| lift(x)).collect(),
    };
    let mut x = problem.project(warm)?;
    if !primal_objective(&x, ps, hp).is_ok_and(f64::is_finite) {
        x = problem.project(&SymMat::identity(ps.dim() + 1))?;
    }
    let mut best_phi = primal_objective(&x, ps, hp)?;
    let mut best = x.clone();

    let mut tau = TAU_START;
    while tau >= TAU_END * 0.5 {
        let mut fx = problem.value(&x, tau);
        let mut step = 0.5 / hp.c4;
        let mut prev: Option<(SymMat, SymMat)> = None;
        for _ in 0..hp.pg_max_it {
            let g = problem.gradient(&x, tau)?;
            if let Some((px, pg)) = &prev {
                let sx = x.sub(px);
                let sxy = sx.dot(&g.sub(pg));
                if sxy > 0.0 {
                    step = (sx.dot(&sx) / sxy).clamp(1e-12, 1e12);
                }
            }
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACKS {
                let mut trial = x.clone();
                trial.axpy(-step, &g);
                let y = problem.project(&trial)?;
                let fy = problem.value(&y, tau);
                if fy.is_finite() && fy <= fx + ARMIJO_SUFFICIENT * g.dot(&y.sub(&x)) {
                    accepted = Some((y, fy));
                    break;
                }
                step *= ARMIJO_SHRINK;
            }
            let Some((y, fy)) = accepted else { break };
            let rel = libm::fabs(fx - fy) / (1.0 + libm::fabs(fx));
            prev = Some((x, g));
            x = y;
            fx = fy;
            if let Ok(phi) = primal_objective(&x, ps, hp) {
                if phi < best_phi {
                    best_phi = phi;
                    best = x.clone();
                }
            }
            if rel < hp.pg_tol {
                break;
            }
        }
        tau *= TAU_SHRINK;
    }
    Ok(best)
}
