//! Versioned JSON model files.
//!
//! Floats are written in shortest round-trip form and parsed back exactly, so
//! a saved model reloads bit for bit.

use std::fs;
use std::path::Path;

use esm_core::geometry::CenteredEllipsoid;
use esm_core::{DualStep, Hyperparams, SdpMode, SymMat, TrainedModel};
use serde::{Deserialize, Serialize};

use crate::data::MinMaxScaler;
use crate::error::{EsmError, Result};

pub const SCHEMA_VERSION: u32 = 1;
const FORMAT_TAG: &str = "esm-model";

/// Serializable copy of [`Hyperparams`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperparamsRecord {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub eps_gs: f64,
    pub r_inner: usize,
    pub max_bundle_it: usize,
    pub eps_cls: f64,
    pub max_outer: usize,
    pub pg_tol: f64,
    pub pg_max_it: usize,
    pub eig_floor: f64,
    pub fix_s: bool,
    pub max_pairs: Option<usize>,
    pub exact_sdp: bool,
    #[serde(default)]
    pub adaptive_dual_step: bool,
}

impl From<&Hyperparams> for HyperparamsRecord {
    fn from(hp: &Hyperparams) -> Self {
        HyperparamsRecord {
            c1: hp.c1,
            c2: hp.c2,
            c3: hp.c3,
            c4: hp.c4,
            eps_gs: hp.eps_gs,
            r_inner: hp.r_inner,
            max_bundle_it: hp.max_bundle_it,
            eps_cls: hp.eps_cls,
            max_outer: hp.max_outer,
            pg_tol: hp.pg_tol,
            pg_max_it: hp.pg_max_it,
            eig_floor: hp.eig_floor,
            fix_s: hp.fix_s,
            max_pairs: hp.max_pairs,
            exact_sdp: hp.sdp_mode == SdpMode::ExactPrimal,
            adaptive_dual_step: hp.dual_step == DualStep::Adaptive,
        }
    }
}

impl From<&HyperparamsRecord> for Hyperparams {
    fn from(r: &HyperparamsRecord) -> Self {
        Hyperparams {
            c1: r.c1,
            c2: r.c2,
            c3: r.c3,
            c4: r.c4,
            eps_gs: r.eps_gs,
            r_inner: r.r_inner,
            max_bundle_it: r.max_bundle_it,
            eps_cls: r.eps_cls,
            max_outer: r.max_outer,
            pg_tol: r.pg_tol,
            pg_max_it: r.pg_max_it,
            eig_floor: r.eig_floor,
            fix_s: r.fix_s,
            max_pairs: r.max_pairs,
            sdp_mode: if r.exact_sdp { SdpMode::ExactPrimal } else { SdpMode::DualAscent },
            dual_step: if r.adaptive_dual_step { DualStep::Adaptive } else { DualStep::Diminishing },
        }
    }
}

/// A trained model with the settings it was trained with and the optional
/// input scaling applied before it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: TrainedModel,
    pub hyperparams: Hyperparams,
    pub scaler: Option<MinMaxScaler>,
}

#[derive(Serialize, Deserialize)]
struct OnDisk {
    format: String,
    schema: u32,
    feature_dim: usize,
    shape: Vec<Vec<f64>>,
    center: Vec<f64>,
    delta: f64,
    eps_cls: f64,
    degenerate: bool,
    xbar_plus: Vec<Vec<f64>>,
    xbar_minus: Vec<Vec<f64>>,
    hyperparams: HyperparamsRecord,
    scaler: Option<MinMaxScaler>,
}

impl ModelFile {
    pub fn to_json(&self) -> String {
        let e = self.model.ellipsoid();
        let n = e.dim();
        let disk = OnDisk {
            format: FORMAT_TAG.into(),
            schema: SCHEMA_VERSION,
            feature_dim: n,
            shape: (0..n).map(|i| (0..n).map(|j| e.shape().get(i, j)).collect()).collect(),
            center: e.center().to_vec(),
            delta: e.delta(),
            eps_cls: self.model.eps_cls(),
            degenerate: self.model.is_degenerate(),
            xbar_plus: self.model.xbar_plus().to_vec(),
            xbar_minus: self.model.xbar_minus().to_vec(),
            hyperparams: (&self.hyperparams).into(),
            scaler: self.scaler.clone(),
        };
        let mut s = serde_json::to_string_pretty(&disk).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| EsmError::CorruptFile(e.to_string()))?;
        if value.get("format").and_then(|f| f.as_str()) != Some(FORMAT_TAG) {
            return Err(EsmError::CorruptFile("not a model file".into()));
        }
        let schema = value.get("schema").and_then(|s| s.as_u64()).unwrap_or(0) as u32;
        if schema != SCHEMA_VERSION {
            return Err(EsmError::SchemaMismatch { found: schema, expected: SCHEMA_VERSION });
        }
        let disk: OnDisk = serde_json::from_value(value).map_err(|e| EsmError::CorruptFile(e.to_string()))?;
        let n = disk.feature_dim;
        let corrupt = |what: &str| EsmError::CorruptFile(what.to_string());
        if disk.shape.len() != n || disk.shape.iter().any(|r| r.len() != n) || disk.center.len() != n {
            return Err(corrupt("shape or center does not match feature_dim"));
        }
        let flat: Vec<f64> = disk.shape.concat();
        if (0..n).any(|i| (0..i).any(|j| flat[i * n + j] != flat[j * n + i])) {
            return Err(corrupt("shape matrix is not symmetric"));
        }
        let shape = SymMat::from_row_major(n, &flat).map_err(|e| EsmError::CorruptFile(e.to_string()))?;
        let ellipsoid = CenteredEllipsoid::with_delta(shape, disk.center, disk.delta)
            .map_err(|e| EsmError::CorruptFile(e.to_string()))?;
        let model = TrainedModel::from_parts(ellipsoid, disk.xbar_plus, disk.xbar_minus, disk.eps_cls)
            .map_err(|e| EsmError::CorruptFile(e.to_string()))?;
        if model.is_degenerate() != disk.degenerate {
            return Err(corrupt("degenerate flag disagrees with the reduced sets"));
        }
        if let Some(s) = &disk.scaler {
            if s.min.len() != n || s.max.len() != n {
                return Err(corrupt("scaler does not match feature_dim"));
            }
        }
        Ok(ModelFile { model, hyperparams: (&disk.hyperparams).into(), scaler: disk.scaler })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| EsmError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| EsmError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Applies the stored scaling, if any.
    pub fn prepare(&self, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        match &self.scaler {
            Some(s) => s.transform(points),
            None => points.to_vec(),
        }
    }
}
