//! Ellipsoids in two representations.
//!
//! A [`HomEllipsoid`] is the lifted `(n+1)×(n+1)` matrix
//! `S̃ = [[s, tᵀ], [t, F]]`; a point `x` belongs to the ellipsoid when
//! `(1, x)ᵀ S̃ (1, x) ≤ 1`. Membership is linear in `S̃`, which is what the
//! training problem optimizes over. A [`CenteredEllipsoid`] is the usual
//! `(x − γ)ᵀ S (x − γ) ≤ 1` form used for prediction.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::symmat::{eig_sym, SymMat, TOL_PD};

/// Lifted points are considered inside the unit level set up to this slack.
pub const TOL_MEM: f64 = 1e-12;
/// `to_centered` refuses offsets `δ ≥ 1 − TOL_EMPTY`.
pub const TOL_EMPTY: f64 = 1e-9;
/// Offset used by [`HomEllipsoid::from_centered`].
pub const DELTA_REPR: f64 = 0.5;

/// Homogeneous (lifted) ellipsoid `S̃ = [[s, tᵀ], [t, F]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomEllipsoid {
    mat: SymMat,
}

impl HomEllipsoid {
    pub fn new(mat: SymMat) -> Result<Self> {
        if mat.dim() < 2 {
            return Err(Error::InvalidArgument("lifted matrix needs dimension n + 1 >= 2"));
        }
        if !mat.is_finite() {
            return Err(Error::InvalidMatrix);
        }
        Ok(HomEllipsoid { mat })
    }

    /// Feature-space dimension `n`.
    pub fn dim(&self) -> usize {
        self.mat.dim() - 1
    }

    pub fn matrix(&self) -> &SymMat {
        &self.mat
    }

    pub fn into_matrix(self) -> SymMat {
        self.mat
    }

    pub fn s(&self) -> f64 {
        self.mat.get(0, 0)
    }

    pub fn t(&self) -> Vec<f64> {
        (1..=self.dim()).map(|i| self.mat.get(0, i)).collect()
    }

    pub fn f(&self) -> SymMat {
        self.mat.block(1, self.dim())
    }

    /// `(1, x)ᵀ S̃ (1, x) = s + 2xᵀt + xᵀFx`.
    pub fn lift_value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(lift_value_unchecked(&self.mat, x))
    }

    /// Splits `S̃` into `(S, γ, δ)` with `γ = −F⁻¹t`, `δ = s − γᵀFγ` and
    /// `S = F / (1 − δ)`.
    pub fn to_centered(&self) -> Result<CenteredEllipsoid> {
        let n = self.dim();
        let f = self.f();
        let eig = eig_sym(&f)?;
        if eig.min_value() <= TOL_PD {
            return Err(Error::SingularF { min_eigenvalue: eig.min_value() });
        }
        let t = self.t();
        // γ = −V diag(1/w) Vᵀ t
        let mut center = alloc::vec![0.0; n];
        for k in 0..n {
            let v = eig.vector(k);
            let proj: f64 = v.iter().zip(&t).map(|(a, b)| a * b).sum();
            let coef = -proj / eig.values()[k];
            for (c, vi) in center.iter_mut().zip(v) {
                *c += coef * vi;
            }
        }
        let delta = self.s() - f.quad_form(&center);
        if !(delta < 1.0 - TOL_EMPTY) {
            return Err(Error::EmptyEllipsoid { delta });
        }
        let shape = f.scaled(1.0 / (1.0 - delta));
        Ok(CenteredEllipsoid { shape, center, delta })
    }

    /// Lifts `(S, γ)` with the fixed offset `δ = 1/2`:
    /// `F = S/2`, `t = −Fγ`, `s = 1/2 + γᵀFγ`.
    pub fn from_centered(shape: &SymMat, center: &[f64]) -> Result<Self> {
        check_dim(shape.dim(), center.len())?;
        let eig = eig_sym(shape)?;
        if eig.min_value() <= TOL_PD {
            return Err(Error::SingularMatrix { min_eigenvalue: eig.min_value() });
        }
        let n = center.len();
        let f = shape.scaled(1.0 - DELTA_REPR);
        let fg = f.mat_vec(center);
        let s = DELTA_REPR + center.iter().zip(&fg).map(|(a, b)| a * b).sum::<f64>();
        let mut mat = SymMat::zeros(n + 1);
        mat.set(0, 0, s);
        for i in 0..n {
            mat.set(0, i + 1, -fg[i]);
            for j in i..n {
                mat.set(i + 1, j + 1, f.get(i, j));
            }
        }
        HomEllipsoid::new(mat)
    }
}

/// `x̃ᵀ S̃ x̃` with `x̃ = (1, x)`, without the dimension check.
pub(crate) fn lift_value_unchecked(mat: &SymMat, x: &[f64]) -> f64 {
    let n = x.len();
    debug_assert_eq!(mat.dim(), n + 1);
    let m = mat.as_slice();
    let stride = n + 1;
    let mut lin = 0.0;
    let mut quad = 0.0;
    for i in 0..n {
        lin += m[i + 1] * x[i];
        let row = &m[(i + 1) * stride + 1..(i + 2) * stride];
        let mut r = 0.0;
        for j in 0..n {
            r += row[j] * x[j];
        }
        quad += x[i] * r;
    }
    m[0] + 2.0 * lin + quad
}

/// Ellipsoid `{x : (x − γ)ᵀ S (x − γ) ≤ 1}` together with the lifting offset
/// `δ` it was extracted with.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredEllipsoid {
    shape: SymMat,
    center: Vec<f64>,
    delta: f64,
}

/// Minimum of the ellipsoid's quadratic along a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentMin {
    pub value: f64,
    /// Position on the segment, `0` at the first endpoint.
    pub alpha: f64,
}

impl CenteredEllipsoid {
    /// Builds an ellipsoid from a positive definite shape matrix and a center.
    pub fn new(shape: SymMat, center: Vec<f64>) -> Result<Self> {
        Self::with_delta(shape, center, DELTA_REPR)
    }

    pub fn with_delta(shape: SymMat, center: Vec<f64>, delta: f64) -> Result<Self> {
        check_dim(shape.dim(), center.len())?;
        let eig = eig_sym(&shape)?;
        if eig.min_value() <= TOL_PD {
            return Err(Error::SingularMatrix { min_eigenvalue: eig.min_value() });
        }
        if center.iter().any(|c| !c.is_finite()) || !delta.is_finite() {
            return Err(Error::InvalidArgument("ellipsoid center and offset must be finite"));
        }
        Ok(CenteredEllipsoid { shape, center, delta })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn shape(&self) -> &SymMat {
        &self.shape
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `(x − γ)ᵀ S (x − γ)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        self.shape.quad_form(&d)
    }

    /// Boundary points count as inside.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.value(x) <= 1.0 + TOL_MEM
    }

    /// Minimizes `g(α) = (p(α) − γ)ᵀ S (p(α) − γ)` over `α ∈ [0, 1]` with
    /// `p(α) = αx + (1 − α)z`.
    pub fn segment_min_value(&self, z: &[f64], x: &[f64]) -> SegmentMin {
        debug_assert_eq!(z.len(), self.dim());
        debug_assert_eq!(x.len(), self.dim());
        // g(α) = aα² + 2bα + c with d = x − z and w = z − γ
        let d: Vec<f64> = x.iter().zip(z).map(|(a, b)| a - b).collect();
        let w: Vec<f64> = z.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let sd = self.shape.mat_vec(&d);
        let a: f64 = d.iter().zip(&sd).map(|(p, q)| p * q).sum();
        let b: f64 = w.iter().zip(&sd).map(|(p, q)| p * q).sum();
        let c = self.shape.quad_form(&w);
        let at_one = a + 2.0 * b + c;

        let mut best = if at_one < c {
            SegmentMin { value: at_one, alpha: 1.0 }
        } else {
            SegmentMin { value: c, alpha: 0.0 }
        };
        if a > 0.0 {
            let alpha = -b / a;
            if alpha > 0.0 && alpha < 1.0 {
                let value = (a * alpha + 2.0 * b) * alpha + c;
                if value < best.value {
                    best = SegmentMin { value: value.max(0.0), alpha };
                }
            }
        }
        best
    }

    /// Whether the segment `[z, x]` meets the ellipsoid.
    pub fn segment_intersects(&self, z: &[f64], x: &[f64]) -> bool {
        self.segment_min_value(z, x).value <= 1.0 + TOL_MEM
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_circle() -> CenteredEllipsoid {
        CenteredEllipsoid::new(SymMat::identity(2), vec![0.0, 0.0]).unwrap()
    }

    fn random_pd(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> SymMat {
        // random rotation via Gram-Schmidt, random spectrum in [lo, hi]
        let mut basis: Vec<Vec<f64>> = Vec::new();
        while basis.len() < n {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            for b in &basis {
                let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= p * bi;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-3 {
                basis.push(v.iter().map(|x| x / norm).collect());
            }
        }
        let spectrum: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        SymMat::from_fn(n, |i, j| (0..n).map(|k| spectrum[k] * basis[k][i] * basis[k][j]).sum())
    }

    fn random_hom(rng: &mut ChaCha8Rng, n: usize) -> HomEllipsoid {
        let shape = random_pd(rng, n, 0.2, 3.0);
        let center: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let e = HomEllipsoid::from_centered(&shape, &center).unwrap();
        // perturb the gauge: scale so that δ varies away from 1/2
        let scale = rng.random_range(0.3..1.5);
        HomEllipsoid::new(e.matrix().scaled(scale)).unwrap()
    }

    #[test]
    fn lift_value_examples() {
        let e = HomEllipsoid::new(SymMat::from_diag(&[0.0, 1.0, 1.0])).unwrap();
        assert_eq!(e.lift_value(&[3.0, 4.0]).unwrap(), 25.0);
        let e = HomEllipsoid::new(SymMat::identity(3)).unwrap();
        assert_eq!(e.lift_value(&[0.0, 0.0]).unwrap(), 1.0);
        assert!(matches!(e.lift_value(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn lift_value_decomposes_around_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let n = rng.random_range(1..6);
            let e = random_hom(&mut rng, n);
            let c = e.to_centered().unwrap();
            let f = e.f();
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
            let d: Vec<f64> = x.iter().zip(c.center()).map(|(a, b)| a - b).collect();
            let expected = f.quad_form(&d) + c.delta();
            assert!((e.lift_value(&x).unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn to_centered_examples() {
        let e = HomEllipsoid::new(SymMat::from_diag(&[0.5, 1.0, 1.0])).unwrap();
        let c = e.to_centered().unwrap();
        assert_eq!(c.center(), &[0.0, 0.0]);
        assert_eq!(c.delta(), 0.5);
        assert_eq!(c.shape(), &SymMat::scaled_identity(2, 2.0));

        let mut m = SymMat::identity(3);
        m.set(0, 1, -1.0);
        let c = HomEllipsoid::new(m).unwrap().to_centered().unwrap();
        assert_eq!(c.center(), &[1.0, 0.0]);
        assert_eq!(c.delta(), 0.0);
        assert_eq!(c.shape(), &SymMat::identity(2));
    }

    #[test]
    fn to_centered_errors() {
        let e = HomEllipsoid::new(SymMat::from_diag(&[1.0, 1.0, 0.0])).unwrap();
        assert!(matches!(e.to_centered(), Err(Error::SingularF { .. })));
        let e = HomEllipsoid::new(SymMat::from_diag(&[1.0, 1.0, 1.0])).unwrap();
        assert!(matches!(e.to_centered(), Err(Error::EmptyEllipsoid { .. })));
    }

    #[test]
    fn from_centered_examples() {
        let e = HomEllipsoid::from_centered(&SymMat::scaled_identity(2, 2.0), &[0.0, 0.0]).unwrap();
        assert_eq!(e.matrix(), &SymMat::from_diag(&[0.5, 1.0, 1.0]));

        let e = HomEllipsoid::from_centered(&SymMat::identity(2), &[1.0, 0.0]).unwrap();
        assert_eq!(e.s(), 1.0);
        assert_eq!(e.t(), vec![-0.5, 0.0]);
        assert_eq!(e.f(), SymMat::scaled_identity(2, 0.5));
    }

    #[test]
    fn centered_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let n = rng.random_range(1..6);
            let shape = random_pd(&mut rng, n, 0.1, 5.0);
            let center: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let hom = HomEllipsoid::from_centered(&shape, &center).unwrap();
            assert!(hom.matrix().min_eigenvalue().unwrap() > 0.0);
            let back = hom.to_centered().unwrap();
            assert!((back.delta() - DELTA_REPR).abs() < 1e-9);
            for (a, b) in back.center().iter().zip(&center) {
                assert!((a - b).abs() < 1e-9);
            }
            for i in 0..n {
                for j in 0..n {
                    assert!((back.shape().get(i, j) - shape.get(i, j)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn level_set_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        for _ in 0..10_000 {
            let n = rng.random_range(1..5);
            let e = random_hom(&mut rng, n);
            let c = match e.to_centered() {
                Ok(c) => c,
                Err(Error::EmptyEllipsoid { .. }) => continue,
                Err(err) => panic!("{err}"),
            };
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
            let v = e.lift_value(&x).unwrap();
            if (v - 1.0).abs() < 1e-7 {
                continue;
            }
            assert_eq!(v <= 1.0, c.contains(&x));
            checked += 1;
        }
        assert!(checked > 5000);
    }

    #[test]
    fn schur_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let n = rng.random_range(1..5);
            let m = random_pd(&mut rng, n + 1, 1e-3, 2.0);
            let e = HomEllipsoid::new(m).unwrap();
            let f = e.f();
            let inv = crate::symmat::inverse(&f).unwrap();
            let t = e.t();
            let delta = e.s() - inv.quad_form(&t);
            assert!(delta >= -1e-9);
        }
    }

    #[test]
    fn contains_examples() {
        let c = unit_circle();
        assert!(c.contains(&[0.5, 0.0]));
        assert!(!c.contains(&[2.0, 0.0]));
        assert!(c.contains(&[1.0, 0.0]));
    }

    #[test]
    fn segment_min_examples() {
        let c = unit_circle();
        let m = c.segment_min_value(&[-2.0, 0.0], &[2.0, 0.0]);
        assert_eq!(m, SegmentMin { value: 0.0, alpha: 0.5 });
        let m = c.segment_min_value(&[2.0, 0.0], &[3.0, 0.0]);
        assert_eq!(m, SegmentMin { value: 4.0, alpha: 0.0 });
        // degenerate segment reduces to membership of the point
        let m = c.segment_min_value(&[0.5, 0.0], &[0.5, 0.0]);
        assert_eq!(m, SegmentMin { value: 0.25, alpha: 0.0 });
    }

    #[test]
    fn segment_intersects_examples() {
        let c = unit_circle();
        assert!(c.segment_intersects(&[2.0, 0.0], &[-2.0, 0.0]));
        assert!(!c.segment_intersects(&[2.0, 2.0], &[3.0, 3.0]));
        assert!(!c.segment_intersects(&[2.0, 0.0], &[0.0, 2.0]));
    }

    #[test]
    fn segment_min_matches_dense_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let samples = 2000;
        for _ in 0..2000 {
            let n = rng.random_range(2..=6);
            let c = CenteredEllipsoid::new(
                random_pd(&mut rng, n, 0.05, 2.0),
                (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            let z: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let m = c.segment_min_value(&z, &x);
            let mut grid = f64::INFINITY;
            for k in 0..samples {
                let alpha = k as f64 / (samples - 1) as f64;
                let p: Vec<f64> = x.iter().zip(&z).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
                grid = grid.min(c.value(&p));
            }
            let d: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a - b).collect();
            let a = c.shape().quad_form(&d);
            let h = 1.0 / (samples - 1) as f64;
            assert!(m.value <= grid + 1e-9);
            assert!(grid - m.value <= a * h * h / 4.0 + 1e-9);
        }
    }

    #[test]
    fn segment_symmetry_and_endpoint_containment() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..5000 {
            let n = rng.random_range(2..=5);
            let c = CenteredEllipsoid::new(random_pd(&mut rng, n, 0.1, 2.0), vec![0.0; n]).unwrap();
            let z: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let q = c.segment_min_value(&z, &x).value;
            if (q - 1.0).abs() > 1e-9 {
                assert_eq!(c.segment_intersects(&z, &x), c.segment_intersects(&x, &z));
            }
            if c.contains(&z) || c.contains(&x) {
                assert!(c.segment_intersects(&z, &x));
            }
        }
    }
}
