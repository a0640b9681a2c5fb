use esm::data::{make_synthetic, stratified_folds, Dataset, SynthSpec};
use esm::eval::{grid_search, kfold_cv, write_grid_csv, CvConfig, GridSpec};
use esm_core::{DualStep, Hyperparams, Label};

fn synth(n: usize, sep: f64, seed: u64) -> Dataset {
    make_synthetic(&SynthSpec { n_samples: n, n_features: 2, class_sep: sep, n_clusters_per_class: 1, seed }).unwrap()
}

/// All points packed into a tiny square around the origin.
fn packed() -> Dataset {
    let points: Vec<Vec<f64>> = (0..12).map(|i| vec![0.001 * (i % 4) as f64, 0.001 * (i / 4) as f64]).collect();
    let labels = (0..12).map(|i| if i % 2 == 0 { Label::Plus } else { Label::Minus }).collect();
    Dataset::new(points, labels, 2, "packed").unwrap()
}

/// One ascent iteration never moves the multipliers, so every block solve
/// returns the regularizer minimizer: the unit ball, which swallows the packed
/// points.
fn swallowing_hp() -> Hyperparams {
    Hyperparams { c1: 0.01, c2: 0.01, c3: 1.0, c4: 0.5, max_bundle_it: 1, ..Hyperparams::default() }
}

#[test]
fn three_folds_of_ninety() {
    let ds = synth(90, 2.0, 1);
    let folds = stratified_folds(&ds, 3, 5).unwrap();
    for f in 0..3 {
        let members: Vec<usize> = (0..90).filter(|&i| folds[i] == f).collect();
        assert_eq!(members.len(), 30);
        assert_eq!(ds.subset(&members).class_counts(), (15, 15));
    }
    assert_eq!(folds, stratified_folds(&ds, 3, 5).unwrap());
}

#[test]
fn cv_on_separated_data() {
    let ds = synth(30, 4.0, 2);
    let hp = Hyperparams { c1: 1.0, c2: 1.0, c3: 0.01, c4: 0.01, max_bundle_it: 30, dual_step: DualStep::Adaptive, ..Hyperparams::default() };
    let cfg = CvConfig::default();
    let cv = kfold_cv(&ds, &hp, &cfg).unwrap();
    assert_eq!(cv.fold_scores.len(), 3);
    for r in 0..cfg.rhos.len() {
        let mean = cv.fold_scores.iter().map(|f| f[r].ar).sum::<f64>() / 3.0;
        assert_eq!(cv.mean_ar[r], mean);
    }
    assert!(cv.mean_wc[0] > 0.5, "{cv:?}");
    assert_eq!(cv, kfold_cv(&ds, &hp, &cfg).unwrap());
}

#[test]
fn degenerate_folds_score_as_rejected() {
    let cfg = CvConfig { rhos: vec![0.49], ..CvConfig::default() };
    let cv = kfold_cv(&packed(), &swallowing_hp(), &cfg).unwrap();
    assert_eq!(cv.degenerate_folds, 3);
    assert_eq!(cv.mean_rej[0], 1.0);
    assert!((cv.mean_ar[0] + 0.49).abs() < 1e-15);
}

#[test]
fn singleton_grid_returns_its_cell() {
    let ds = synth(24, 3.0, 3);
    let hp = Hyperparams { c1: 1.0, c2: 1.0, c3: 0.1, c4: 0.1, max_bundle_it: 5, ..Hyperparams::default() };
    let res = grid_search(&ds, &GridSpec::singleton(&hp), &hp, &CvConfig::default(), 1).unwrap();
    assert_eq!(res.rows.len(), 1);
    assert_eq!(res.best, vec![Some(0); 3]);
    assert_eq!(res.rows[0].hp, hp);
}

#[test]
fn ties_go_to_the_smallest_cell() {
    let grid = GridSpec { c1: vec![0.02, 0.01], c2: vec![0.01], c3: vec![1.0], c4: vec![0.5], max_bundle_it: vec![1] };
    let cfg = CvConfig { rhos: vec![0.1], ..CvConfig::default() };
    let res = grid_search(&packed(), &grid, &swallowing_hp(), &cfg, 2).unwrap();
    let ars: Vec<f64> = res.rows.iter().map(|r| r.outcome.as_ref().unwrap().mean_ar[0]).collect();
    assert!(ars.iter().all(|&a| a == ars[0]), "{ars:?}");
    let best = &res.rows[res.best[0].unwrap()].hp;
    assert_eq!(best.c1, 0.01);
}

#[test]
fn failed_cells_are_reported_not_chosen() {
    // a class smaller than the fold count fails every cell
    let mut ds = synth(12, 3.0, 4);
    let keep: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] == Label::Plus || i == ds.len() - 1).collect();
    ds = ds.subset(&keep);
    let hp = Hyperparams { max_bundle_it: 2, ..Hyperparams::default() };
    let res = grid_search(&ds, &GridSpec::singleton(&hp), &hp, &CvConfig::default(), 1).unwrap();
    assert!(res.rows[0].outcome.is_err());
    assert_eq!(res.best, vec![None; 3]);
    let mut csv = Vec::new();
    write_grid_csv(&res, &mut csv).unwrap();
    assert!(String::from_utf8(csv).unwrap().contains("failed"));
}

#[test]
fn grid_is_independent_of_worker_count() {
    let ds = synth(24, 1.0, 6);
    let grid = GridSpec { c1: vec![0.01, 0.1], c2: vec![1.0], c3: vec![0.1], c4: vec![0.1, 1.0], max_bundle_it: vec![4] };
    let base = Hyperparams::default();
    let table = |jobs| {
        let res = grid_search(&ds, &grid, &base, &CvConfig::default(), jobs).unwrap();
        let mut csv = Vec::new();
        write_grid_csv(&res, &mut csv).unwrap();
        csv
    };
    assert_eq!(table(1), table(3));
}
