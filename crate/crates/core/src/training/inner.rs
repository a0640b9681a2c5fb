//! The reduced SDP: minimize
//! `f(S̃) = ⟨A, S̃⟩ + C3 tr(F⁻¹) + C4 ‖S̃‖_F²` over `λ_min(S̃) ≥ floor`.
//!
//! The box-size term replaces the auxiliary matrix `T` of the
//! `[[F, I], [I, T]] ⪰ 0` constraint by its optimal value `tr(F⁻¹)`.
//! Solved by projected gradient with Barzilai-Borwein trial steps and
//! Armijo backtracking.

use crate::error::{Error, Result};
use crate::symmat::{eig_sym, project_psd, SymMat, TOL_PD};

const ARMIJO_SHRINK: f64 = 0.5;
const ARMIJO_SUFFICIENT: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
const FIX_S_ALTERNATIONS: usize = 50;

#[derive(Debug, Clone, Copy)]
pub struct InnerProblem<'a> {
    pub a: &'a SymMat,
    pub c3: f64,
    pub c4: f64,
    pub floor: f64,
    pub fix_s: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub matrix: SymMat,
    pub objective: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit before the relative objective
    /// change fell below tolerance. The matrix is still the best iterate.
    pub converged: bool,
}

impl<'a> InnerProblem<'a> {
    pub fn new(a: &'a SymMat, c3: f64, c4: f64, floor: f64) -> Self {
        InnerProblem { a, c3, c4, floor, fix_s: false }
    }

    pub fn with_fix_s(mut self, fix_s: bool) -> Self {
        self.fix_s = fix_s;
        self
    }

    fn n(&self) -> usize {
        self.a.dim() - 1
    }

    /// Objective value; `+∞` when `C3 > 0` and `F` is not positive definite.
    pub fn objective(&self, x: &SymMat) -> f64 {
        let mut val = self.a.dot(x) + self.c4 * x.dot(x);
        if self.c3 != 0.0 {
            match eig_sym(&x.block(1, self.n())) {
                Ok(eig) if eig.min_value() > TOL_PD => {
                    val += self.c3 * eig.values().iter().map(|w| 1.0 / w).sum::<f64>();
                }
                _ => return f64::INFINITY,
            }
        }
        val
    }

    pub fn gradient(&self, x: &SymMat) -> Result<SymMat> {
        let mut g = self.a.clone();
        g.axpy(2.0 * self.c4, x);
        if self.c3 != 0.0 {
            let n = self.n();
            let eig = eig_sym(&x.block(1, n))?;
            if eig.min_value() <= TOL_PD {
                return Err(Error::SingularF { min_eigenvalue: eig.min_value() });
            }
            let inv_sq = eig.map_spectrum(|w| -1.0 / (w * w));
            for i in 0..n {
                for j in i..n {
                    g.set(i + 1, j + 1, g.get(i + 1, j + 1) + self.c3 * inv_sq.get(i, j));
                }
            }
        }
        Ok(g)
    }

    /// Projection onto the feasible set; with `fix_s` it alternates between
    /// the spectral floor and the slice `s = 1`, ending on the floor.
    pub fn project(&self, x: &SymMat) -> Result<SymMat> {
        let mut y = project_psd(x, self.floor)?;
        if self.fix_s {
            for _ in 0..FIX_S_ALTERNATIONS {
                y.set(0, 0, 1.0);
                y = project_psd(&y, self.floor)?;
            }
        }
        Ok(y)
    }

    /// Certified lower bound on the minimum over `λ_min ≥ floor` (ignoring
    /// `fix_s`), from `2C4`-strong convexity at any feasible `x`:
    /// `f(Y) ≥ f(x) + ⟨g, Y − x⟩ + C4‖Y − x‖²`, minimized in closed form by
    /// `Y = P(x − g / 2C4)`.
    pub fn lower_bound(&self, x: &SymMat) -> Result<f64> {
        if !(self.c4 > 0.0) {
            return Err(Error::InvalidArgument("lower bound needs C4 > 0"));
        }
        let fx = self.objective(x);
        if !fx.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        let g = self.gradient(x)?;
        let mut target = x.clone();
        target.axpy(-0.5 / self.c4, &g);
        let y = project_psd(&target, self.floor)?;
        let d = y.sub(x);
        Ok(fx + g.dot(&d) + self.c4 * d.dot(&d))
    }

    /// Projected gradient from `warm` (or the identity).
    pub fn solve(&self, warm: Option<&SymMat>, tol: f64, max_it: usize) -> Result<InnerSolution> {
        let dim = self.a.dim();
        if let Some(w) = warm {
            if w.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: w.dim() });
            }
        }
        let mut x = match warm {
            Some(w) => self.project(w)?,
            None => self.project(&SymMat::identity(dim))?,
        };
        let mut fx = self.objective(&x);
        if !fx.is_finite() {
            x = self.project(&SymMat::identity(dim))?;
            fx = self.objective(&x);
        }

        let mut step = if self.c4 > 0.0 { 0.5 / self.c4 } else { 1.0 };
        let mut prev: Option<(SymMat, SymMat)> = None;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < max_it {
            iterations += 1;
            let g = self.gradient(&x)?;
            if let Some((px, pg)) = &prev {
                let sx = x.sub(px);
                let sy = g.sub(pg);
                let sxy = sx.dot(&sy);
                if sxy > 0.0 {
                    step = (sx.dot(&sx) / sxy).clamp(1e-12, 1e12);
                }
            }
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACKS {
                let mut trial = x.clone();
                trial.axpy(-step, &g);
                let y = self.project(&trial)?;
                let fy = self.objective(&y);
                let decrease = g.dot(&y.sub(&x));
                if fy.is_finite() && fy <= fx + ARMIJO_SUFFICIENT * decrease {
                    accepted = Some((y, fy));
                    break;
                }
                step *= ARMIJO_SHRINK;
            }
            let Some((y, fy)) = accepted else {
                // no admissible step: x is stationary to working precision
                converged = true;
                break;
            };
            let rel = libm::fabs(fx - fy) / (1.0 + libm::fabs(fx));
            prev = Some((x, g));
            x = y;
            fx = fy;
            if rel < tol {
                converged = true;
                break;
            }
        }
        Ok(InnerSolution { matrix: x, objective: fx, iterations, converged })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_shrinkage_hits_floor() {
        let a = SymMat::zeros(3);
        let p = InnerProblem::new(&a, 0.0, 1.0, 1e-8);
        let sol = p.solve(None, 1e-8, 2000).unwrap();
        let target = SymMat::scaled_identity(3, 1e-8);
        assert!(crate::symmat::frob_sq(&sol.matrix.sub(&target)).sqrt() < 1e-12);
    }

    #[test]
    fn one_dimensional_analytic_optimum() {
        for &(c3, c4) in &[(1.0, 1.0), (0.1, 10.0), (10.0, 0.1), (2.0, 0.5)] {
            let a = SymMat::zeros(2);
            let p = InnerProblem::new(&a, c3, c4, 1e-8);
            let sol = p.solve(None, 1e-12, 20_000).unwrap();
            // c3/f + c4 f² is minimized at f = (c3 / 2c4)^(1/3)
            let f_star = libm::cbrt(c3 / (2.0 * c4));
            assert!((sol.matrix.get(1, 1) - f_star).abs() < 1e-5, "{c3} {c4}: {}", sol.matrix.get(1, 1));
            assert!(sol.matrix.get(0, 1).abs() < 1e-6);
        }
    }

    #[test]
    fn lower_bound_is_below_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = SymMat::from_fn(3, |_, _| rng.random_range(-2.0..2.0));
            let p = InnerProblem::new(&a, 0.5, 1.0, 1e-8);
            let sol = p.solve(None, 1e-10, 5000).unwrap();
            let lb = p.lower_bound(&sol.matrix).unwrap();
            assert!(lb <= sol.objective + 1e-12);
            assert!(sol.objective - lb < 1e-4 * (1.0 + sol.objective.abs()));
            // bound from a poor point is still below the optimum
            let lb_far = p.lower_bound(&SymMat::identity(3)).unwrap();
            assert!(lb_far <= sol.objective + 1e-12);
        }
    }

    #[test]
    fn fix_s_pins_top_left() {
        let a = SymMat::from_diag(&[1.0, -1.0, -1.0]);
        let p = InnerProblem::new(&a, 0.1, 1.0, 1e-8).with_fix_s(true);
        let sol = p.solve(None, 1e-10, 2000).unwrap();
        assert!((sol.matrix.get(0, 0) - 1.0).abs() < 1e-6);
        assert!(sol.matrix.min_eigenvalue().unwrap() >= 1e-8 - 1e-10);
    }

    /// Refined grid search over the 6 entries of a 3×3 PD matrix.
    fn grid_oracle(p: &InnerProblem, start: &SymMat) -> f64 {
        let idx = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
        let mut best = start.clone();
        let mut fbest = p.objective(&best);
        let mut h = 0.5;
        while h > 1e-7 {
            let mut improved = true;
            while improved {
                improved = false;
                let center = best.clone();
                // full 3^6 neighbourhood around the incumbent
                for code in 0..729usize {
                    let mut c = code;
                    let mut cand = center.clone();
                    for &(i, j) in &idx {
                        let off = (c % 3) as f64 - 1.0;
                        c /= 3;
                        cand.set(i, j, center.get(i, j) + off * h);
                    }
                    if cand.min_eigenvalue().unwrap() < p.floor {
                        continue;
                    }
                    let fc = p.objective(&cand);
                    if fc < fbest - 1e-15 {
                        fbest = fc;
                        best = cand;
                        improved = true;
                    }
                }
            }
            h *= 0.5;
        }
        fbest
    }

    #[test]
    fn small_instance_matches_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..3 {
            // A = −BBᵀ keeps the optimum in the interior of the cone
            let b = SymMat::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
            let bbt: Vec<f64> = (0..9)
                .map(|k| (0..3).map(|l| b.get(k / 3, l) * b.get(k % 3, l)).sum::<f64>() + if k % 4 == 0 { 0.3 } else { 0.0 })
                .collect();
            let a = SymMat::from_row_major(3, &bbt).unwrap().scaled(-1.0);
            let p = InnerProblem::new(&a, 0.3, 1.0, 1e-8);
            let sol = p.solve(None, 1e-12, 20_000).unwrap();
            let oracle = grid_oracle(&p, &SymMat::identity(3));
            assert!(sol.objective <= oracle + 1e-4 * (1.0 + oracle.abs()), "{} vs {}", sol.objective, oracle);
            assert!(oracle - sol.objective <= 1e-4 * (1.0 + oracle.abs()));
        }
    }
}
