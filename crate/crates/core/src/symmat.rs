//! Dense symmetric matrices and the spectral operations built on them.
//!
//! The eigendecomposition is the single primitive: inverses, PSD
//! projections and trace-of-inverse gradients are all formed spectrally as
//! `V diag(f(w)) Vᵀ`, which keeps results exactly symmetric.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// Default positive-definiteness tolerance on the smallest eigenvalue.
pub const TOL_PD: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Dense symmetric matrix, stored row-major with both triangles kept equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    dim: usize,
    data: Vec<f64>,
}

impl SymMat {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "SymMat dimension must be at least 1");
        SymMat { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, value: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = value;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle (`i <= j`).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from a full row-major buffer. The upper triangle is
    /// authoritative; the lower triangle is ignored and mirrored.
    pub fn from_row_major(dim: usize, data: &[f64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be at least 1"));
        }
        if data.len() != dim * dim {
            return Err(Error::LengthMismatch { left: data.len(), right: dim * dim });
        }
        Ok(Self::from_fn(dim, |i, j| data[i * dim + j]))
    }

    /// Outer product `w · v vᵀ`.
    pub fn outer(v: &[f64], w: f64) -> Self {
        let mut m = Self::zeros(v.len());
        m.add_outer(w, v);
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets entry `(i, j)` and its mirror `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    /// Row-major view of all `dim²` entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &SymMat) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    pub fn scaled(&self, alpha: f64) -> SymMat {
        let mut m = self.clone();
        m.scale(alpha);
        m
    }

    pub fn sub(&self, other: &SymMat) -> SymMat {
        let mut m = self.clone();
        m.axpy(-1.0, other);
        m
    }

    /// `self += w · v vᵀ`.
    pub fn add_outer(&mut self, w: f64, v: &[f64]) {
        assert_eq!(self.dim, v.len());
        let n = self.dim;
        for i in 0..n {
            let wi = w * v[i];
            for j in i..n {
                let val = self.data[i * n + j] + wi * v[j];
                self.data[i * n + j] = val;
                self.data[j * n + i] = val;
            }
        }
    }

    /// Frobenius inner product `⟨self, other⟩ = Σ_ij a_ij b_ij`.
    pub fn dot(&self, other: &SymMat) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        assert_eq!(self.dim, v.len());
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut r = 0.0;
            for j in 0..n {
                r += row[j] * v[j];
            }
            acc += v[i] * r;
        }
        acc
    }

    /// `uᵀ M v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        assert_eq!(self.dim, u.len());
        assert_eq!(self.dim, v.len());
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut r = 0.0;
            for j in 0..n {
                r += row[j] * v[j];
            }
            acc += u[i] * r;
        }
        acc
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.dim, v.len());
        let n = self.dim;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Principal sub-block on rows/columns `start..start + len`.
    pub fn block(&self, start: usize, len: usize) -> SymMat {
        SymMat::from_fn(len, |i, j| self.get(start + i, start + j))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eig_sym(self)?.values[0])
    }
}

/// Eigendecomposition of a symmetric matrix: `M = V diag(values) Vᵀ`.
///
/// Values are ascending. Each eigenvector has its first non-negligible
/// component positive; equal eigenvalues are ordered by their vectors,
/// compared lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomp {
    values: Vec<f64>,
    /// Column-major: eigenvector `k` occupies `vectors[k * n..(k + 1) * n]`.
    vectors: Vec<f64>,
}

impl EigDecomp {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        let n = self.dim();
        &self.vectors[k * n..(k + 1) * n]
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `V diag(f(w)) Vᵀ`, assembled on the upper triangle and mirrored.
    pub fn map_spectrum(&self, mut f: impl FnMut(f64) -> f64) -> SymMat {
        let n = self.dim();
        let mapped: Vec<f64> = self.values.iter().map(|&w| f(w)).collect();
        SymMat::from_fn(n, |i, j| {
            let mut acc = 0.0;
            for (k, &w) in mapped.iter().enumerate() {
                if w != 0.0 {
                    let v = self.vector(k);
                    acc += w * v[i] * v[j];
                }
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> SymMat {
        self.map_spectrum(|w| w)
    }
}

/// Symmetric eigendecomposition by the cyclic Jacobi method.
pub fn eig_sym(m: &SymMat) -> Result<EigDecomp> {
    if !m.is_finite() {
        return Err(Error::InvalidMatrix);
    }
    let n = m.dim;
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let total: f64 = a.iter().map(|x| x * x).sum();
    let threshold = total * (f64::EPSILON * f64::EPSILON) * 1e-4;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= threshold || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if libm::fabs(theta) > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = arp - s * (arq + tau * arp);
                    let new_rq = arq + s * (arp - tau * arq);
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
                // v is row-major here: column k of V is the k-th eigenvector.
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = vrp - s * (vrq + tau * vrp);
                    v[r * n + q] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut vec: Vec<f64> = (0..n).map(|r| v[r * n + k]).collect();
            normalize_sign(&mut vec);
            (a[k * n + k], vec)
        })
        .collect();
    pairs.sort_by(|x, y| match x.0.total_cmp(&y.0) {
        Ordering::Equal => lexicographic(&x.1, &y.1),
        other => other,
    });

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for (w, vec) in pairs {
        values.push(w);
        vectors.extend_from_slice(&vec);
    }
    Ok(EigDecomp { values, vectors })
}

fn normalize_sign(v: &mut [f64]) {
    let first = v.iter().copied().find(|x| libm::fabs(*x) > 1e-12);
    if let Some(x) = first {
        if x < 0.0 {
            for c in v.iter_mut() {
                *c = -*c;
            }
        }
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Frobenius-nearest matrix whose eigenvalues are all at least `floor`.
pub fn project_psd(m: &SymMat, floor: f64) -> Result<SymMat> {
    if !(floor >= 0.0) {
        return Err(Error::InvalidArgument("PSD floor must be non-negative"));
    }
    let eig = eig_sym(m)?;
    if eig.min_value() >= floor {
        return Ok(m.clone());
    }
    Ok(eig.map_spectrum(|w| if w < floor { floor } else { w }))
}

/// `Σ 1/λ_i(F)`, the box-size of the ellipsoid shaped by `F`.
pub fn trace_inverse(f: &SymMat) -> Result<f64> {
    trace_inverse_with_tol(f, TOL_PD)
}

pub fn trace_inverse_with_tol(f: &SymMat, tol_pd: f64) -> Result<f64> {
    let eig = checked_pd(f, tol_pd)?;
    Ok(eig.values().iter().map(|w| 1.0 / w).sum())
}

/// Gradient of [`trace_inverse`]: `−F⁻²`.
pub fn grad_trace_inverse(f: &SymMat) -> Result<SymMat> {
    let eig = checked_pd(f, TOL_PD)?;
    Ok(eig.map_spectrum(|w| -1.0 / (w * w)))
}

/// Spectral inverse `V diag(1/w) Vᵀ`.
pub fn inverse(f: &SymMat) -> Result<SymMat> {
    let eig = checked_pd(f, TOL_PD)?;
    Ok(eig.map_spectrum(|w| 1.0 / w))
}

fn checked_pd(f: &SymMat, tol_pd: f64) -> Result<EigDecomp> {
    let eig = eig_sym(f)?;
    if eig.min_value() <= tol_pd {
        return Err(Error::SingularMatrix { min_eigenvalue: eig.min_value() });
    }
    Ok(eig)
}

/// `Σ_ij M_ij²`.
pub fn frob_sq(m: &SymMat) -> f64 {
    m.as_slice().iter().map(|x| x * x).sum()
}
