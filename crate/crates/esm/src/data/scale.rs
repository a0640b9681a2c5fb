use serde::{Deserialize, Serialize};

/// Per-feature affine map onto `[0, 1]`, fitted on training data. Constant
/// features map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(points: &[Vec<f64>], dim: usize) -> Self {
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for p in points {
            for (i, &v) in p.iter().enumerate() {
                min[i] = min[i].min(v);
                max[i] = max[i].max(v);
            }
        }
        if points.is_empty() {
            min.fill(0.0);
            max.fill(0.0);
        }
        MinMaxScaler { min, max }
    }

    pub fn transform_point(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect()
    }

    pub fn transform(&self, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        points.iter().map(|p| self.transform_point(p)).collect()
    }
}
