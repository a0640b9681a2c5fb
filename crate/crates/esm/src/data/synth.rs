use esm_core::Label;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Dataset;
use crate::error::{EsmError, Result};

/// Two-class Gaussian mixture with centroids on hypercube vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_samples: usize,
    pub n_features: usize,
    /// Half the side of the hypercube holding the centroids.
    pub class_sep: f64,
    pub n_clusters_per_class: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec { n_samples: 150, n_features: 10, class_sep: 1.0, n_clusters_per_class: 2, seed: 42 }
    }
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        if self.n_samples < 2 || self.n_features == 0 || self.n_clusters_per_class == 0 {
            return Err(EsmError::InvalidArgument(
                "need at least 2 samples, 1 feature and 1 cluster per class".into(),
            ));
        }
        if !(self.class_sep >= 0.0 && self.class_sep.is_finite()) {
            return Err(EsmError::InvalidArgument("class_sep must be a non-negative number".into()));
        }
        let needed = 2 * self.n_clusters_per_class;
        if self.n_features < usize::BITS as usize && needed > 1usize << self.n_features {
            return Err(EsmError::TooManyClusters {
                clusters: self.n_clusters_per_class,
                features: self.n_features,
                needed,
            });
        }
        Ok(())
    }
}

/// Distinct random sign patterns; the first half belong to `Plus`.
fn vertex_signs(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<bool>> {
    let needed = 2 * spec.n_clusters_per_class;
    let mut vertices: Vec<Vec<bool>> = Vec::with_capacity(needed);
    while vertices.len() < needed {
        let v: Vec<bool> = (0..spec.n_features).map(|_| rng.random()).collect();
        if !vertices.contains(&v) {
            vertices.push(v);
        }
    }
    vertices
}

/// Cluster centroids `(plus, minus)` of [`make_synthetic`]. The vertex
/// choice depends only on the seed, not on `class_sep`.
pub fn synthetic_centroids(spec: &SynthSpec) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(centroids(spec, &mut rng))
}

fn centroids(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let sep = spec.class_sep;
    let mut c: Vec<Vec<f64>> = vertex_signs(spec, rng)
        .into_iter()
        .map(|v| v.into_iter().map(|s| if s { sep } else { -sep }).collect())
        .collect();
    let minus = c.split_off(spec.n_clusters_per_class);
    (c, minus)
}

/// Draws `ceil(n/2)` plus and `floor(n/2)` minus points; each class is split
/// evenly over its clusters and each point is its centroid plus standard
/// Gaussian noise. Plus points come first.
pub fn make_synthetic(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (plus_c, minus_c) = centroids(spec, &mut rng);
    let n_plus = spec.n_samples.div_ceil(2);
    let n_minus = spec.n_samples - n_plus;
    let mut points = Vec::with_capacity(spec.n_samples);
    let mut labels = Vec::with_capacity(spec.n_samples);
    for (count, cents, label) in [(n_plus, &plus_c, Label::Plus), (n_minus, &minus_c, Label::Minus)] {
        let k = cents.len();
        for (c, centroid) in cents.iter().enumerate() {
            let size = count / k + usize::from(c < count % k);
            for _ in 0..size {
                let p: Vec<f64> = centroid
                    .iter()
                    .map(|&m| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        m + z
                    })
                    .collect();
                points.push(p);
                labels.push(label);
            }
        }
    }
    let name = format!("synth_sep{}_k{}_s{}", spec.class_sep, spec.n_clusters_per_class, spec.seed);
    Dataset::new(points, labels, spec.n_features, name)
}
