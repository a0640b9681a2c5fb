//! Cross-validation and grid search, scored by accuracy with rejection.

use std::io::Write;

use esm_core::metrics::{score, RejectionScores};
use esm_core::{fit, Hyperparams, Label};
use rayon::prelude::*;

use crate::data::{stratified_folds, Dataset, MinMaxScaler};
use crate::error::{EsmError, Result};
use crate::model_file::ModelFile;

/// Rejection costs of the reported tables.
pub const DEFAULT_RHOS: [f64; 3] = [0.1, 0.3, 0.49];

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub rhos: Vec<f64>,
    pub seed: u64,
    /// Fit a min-max scaler on each training part.
    pub scale: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { folds: 3, rhos: DEFAULT_RHOS.to_vec(), seed: 42, scale: false }
    }
}

/// Trains on `train` and returns the model file (with scaler if requested).
pub fn train_model(train: &Dataset, hp: &Hyperparams, scale: bool) -> Result<(ModelFile, esm_core::FitOutput)> {
    let scaler = scale.then(|| MinMaxScaler::fit(&train.points, train.feature_dim));
    let prepared = match &scaler {
        Some(s) => Dataset { points: s.transform(&train.points), ..train.clone() },
        None => train.clone(),
    };
    let (plus, minus) = prepared.by_class();
    let out = fit(&plus, &minus, hp)?;
    let file = ModelFile { model: out.model.clone(), hyperparams: hp.clone(), scaler };
    Ok((file, out))
}

pub fn predict_dataset(model: &ModelFile, ds: &Dataset) -> Result<Vec<Label>> {
    Ok(model.model.predict_batch(&model.prepare(&ds.points))?)
}

/// Scores the same predictions at every rejection cost.
pub fn score_all(truth: &[Label], predicted: &[Label], rhos: &[f64]) -> Result<Vec<RejectionScores>> {
    rhos.iter().map(|&rho| Ok(score(truth, predicted, rho)?)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    /// `[fold][rho]`.
    pub fold_scores: Vec<Vec<RejectionScores>>,
    /// Unweighted mean of the fold ARs, per rho.
    pub mean_ar: Vec<f64>,
    pub mean_wc: Vec<f64>,
    pub mean_mc: Vec<f64>,
    pub mean_rej: Vec<f64>,
    /// Folds whose model rejected everything because a reduced set was empty.
    pub degenerate_folds: usize,
}

/// Stratified `k`-fold cross-validation. A fold whose model is degenerate
/// counts with every held-out point rejected.
pub fn kfold_cv(ds: &Dataset, hp: &Hyperparams, cfg: &CvConfig) -> Result<CvResult> {
    if cfg.rhos.is_empty() {
        return Err(EsmError::InvalidArgument("need at least one rejection cost".into()));
    }
    let assignment = stratified_folds(ds, cfg.folds, cfg.seed)?;
    let mut fold_scores = Vec::with_capacity(cfg.folds);
    let mut degenerate_folds = 0;
    for f in 0..cfg.folds {
        let train_idx: Vec<usize> = (0..ds.len()).filter(|&i| assignment[i] != f).collect();
        let test_idx: Vec<usize> = (0..ds.len()).filter(|&i| assignment[i] == f).collect();
        let (model, _) = train_model(&ds.subset(&train_idx), hp, cfg.scale)?;
        if model.model.is_degenerate() {
            degenerate_folds += 1;
        }
        let test = ds.subset(&test_idx);
        let predicted = predict_dataset(&model, &test)?;
        fold_scores.push(score_all(&test.labels, &predicted, &cfg.rhos)?);
    }
    let mean = |get: fn(&RejectionScores) -> f64| -> Vec<f64> {
        (0..cfg.rhos.len())
            .map(|r| fold_scores.iter().map(|fs| get(&fs[r])).sum::<f64>() / cfg.folds as f64)
            .collect()
    };
    Ok(CvResult {
        mean_ar: mean(|s| s.ar),
        mean_wc: mean(|s| s.wc),
        mean_mc: mean(|s| s.mc),
        mean_rej: mean(|s| s.rej),
        fold_scores,
        degenerate_folds,
    })
}

/// Candidate values per hyperparameter. Lists are sorted and deduplicated,
/// so grid order is also the tie-break order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub c3: Vec<f64>,
    pub c4: Vec<f64>,
    pub max_bundle_it: Vec<usize>,
}

impl GridSpec {
    /// The search space used for the synthetic benchmarks (576 cells).
    pub fn full() -> Self {
        let wide = vec![0.1, 1.0, 10.0, 100.0];
        GridSpec {
            c1: vec![0.001, 0.01, 0.1],
            c2: wide.clone(),
            c3: wide.clone(),
            c4: wide,
            max_bundle_it: vec![15, 30, 50],
        }
    }

    pub fn singleton(hp: &Hyperparams) -> Self {
        GridSpec { c1: vec![hp.c1], c2: vec![hp.c2], c3: vec![hp.c3], c4: vec![hp.c4], max_bundle_it: vec![hp.max_bundle_it] }
    }

    fn normalized(&self) -> Result<GridSpec> {
        let norm = |v: &[f64]| -> Result<Vec<f64>> {
            let mut v = v.to_vec();
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                return Err(EsmError::InvalidArgument("grid lists must be nonempty and finite".into()));
            }
            v.sort_by(f64::total_cmp);
            v.dedup();
            Ok(v)
        };
        let mut its = self.max_bundle_it.clone();
        if its.is_empty() {
            return Err(EsmError::InvalidArgument("grid lists must be nonempty and finite".into()));
        }
        its.sort_unstable();
        its.dedup();
        Ok(GridSpec { c1: norm(&self.c1)?, c2: norm(&self.c2)?, c3: norm(&self.c3)?, c4: norm(&self.c4)?, max_bundle_it: its })
    }

    /// Cartesian product in lexicographic order `(C1, C2, C3, C4, max_bundle_it)`.
    pub fn cells(&self, base: &Hyperparams) -> Result<Vec<Hyperparams>> {
        let g = self.normalized()?;
        let mut out = Vec::new();
        for &c1 in &g.c1 {
            for &c2 in &g.c2 {
                for &c3 in &g.c3 {
                    for &c4 in &g.c4 {
                        for &it in &g.max_bundle_it {
                            out.push(Hyperparams { c1, c2, c3, c4, max_bundle_it: it, ..base.clone() });
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct GridRow {
    pub hp: Hyperparams,
    /// Error message when the cell could not be evaluated.
    pub outcome: std::result::Result<CvResult, String>,
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub rhos: Vec<f64>,
    pub rows: Vec<GridRow>,
    /// Index of the best row per rho; `None` when every cell failed.
    pub best: Vec<Option<usize>>,
}

/// Cross-validates every cell, in parallel on at most `jobs` threads. The
/// result does not depend on `jobs`.
pub fn grid_search(
    ds: &Dataset,
    grid: &GridSpec,
    base: &Hyperparams,
    cfg: &CvConfig,
    jobs: usize,
) -> Result<GridResult> {
    let cells = grid.cells(base)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| EsmError::InvalidArgument(e.to_string()))?;
    let rows: Vec<GridRow> = pool.install(|| {
        cells
            .into_par_iter()
            .map(|hp| {
                let outcome = kfold_cv(ds, &hp, cfg).map_err(|e| e.to_string());
                GridRow { hp, outcome }
            })
            .collect()
    });
    let best = (0..cfg.rhos.len())
        .map(|r| {
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in rows.iter().enumerate() {
                if let Ok(cv) = &row.outcome {
                    // strict comparison keeps the earliest, i.e. smallest, cell
                    if best.is_none_or(|(_, ar)| cv.mean_ar[r] > ar) {
                        best = Some((i, cv.mean_ar[r]));
                    }
                }
            }
            best.map(|b| b.0)
        })
        .collect();
    Ok(GridResult { rhos: cfg.rhos.clone(), rows, best })
}

/// One CSV line per (cell, rho) with fold and mean metrics.
pub fn write_grid_csv(result: &GridResult, out: impl Write) -> Result<()> {
    let folds = result
        .rows
        .iter()
        .find_map(|r| r.outcome.as_ref().ok().map(|cv| cv.fold_scores.len()))
        .unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["c1", "c2", "c3", "c4", "max_bundle_it", "rho", "status", "mean_ar", "mean_wc", "mean_mc", "mean_rej"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=folds).map(|f| format!("fold{f}_ar")));
    header.push("error".into());
    w.write_record(&header)?;
    for row in &result.rows {
        for (r, rho) in result.rhos.iter().enumerate() {
            let hp = &row.hp;
            let mut rec = vec![
                hp.c1.to_string(),
                hp.c2.to_string(),
                hp.c3.to_string(),
                hp.c4.to_string(),
                hp.max_bundle_it.to_string(),
                rho.to_string(),
            ];
            match &row.outcome {
                Ok(cv) => {
                    rec.push("ok".into());
                    rec.extend([cv.mean_ar[r], cv.mean_wc[r], cv.mean_mc[r], cv.mean_rej[r]].map(|v| v.to_string()));
                    rec.extend(cv.fold_scores.iter().map(|fs| fs[r].ar.to_string()));
                    rec.push(String::new());
                }
                Err(msg) => {
                    rec.push("failed".into());
                    rec.extend(std::iter::repeat_n(String::new(), 4 + folds));
                    rec.push(msg.clone());
                }
            }
            w.write_record(&rec)?;
        }
    }
    w.flush().map_err(|e| EsmError::InvalidArgument(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_grid_has_576_cells() {
        assert_eq!(GridSpec::full().cells(&Hyperparams::default()).unwrap().len(), 576);
    }

    #[test]
    fn cells_are_lexicographic() {
        let g = GridSpec { c1: vec![0.1, 0.01], c2: vec![1.0], c3: vec![1.0], c4: vec![2.0, 1.0], max_bundle_it: vec![30, 15] };
        let cells = g.cells(&Hyperparams::default()).unwrap();
        let keys: Vec<(f64, f64, usize)> = cells.iter().map(|h| (h.c1, h.c4, h.max_bundle_it)).collect();
        assert_eq!(keys[0], (0.01, 1.0, 15));
        assert_eq!(keys[1], (0.01, 1.0, 30));
        assert_eq!(keys[2], (0.01, 2.0, 15));
        assert_eq!(keys[7], (0.1, 2.0, 30));
    }

    #[test]
    fn empty_grid_list_is_an_error() {
        let g = GridSpec { c1: vec![], ..GridSpec::full() };
        assert!(g.cells(&Hyperparams::default()).is_err());
    }
}
