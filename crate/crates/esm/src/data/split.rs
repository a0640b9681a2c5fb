use esm_core::Label;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::error::{EsmError, Result};

/// Indices of each class, shuffled with a generator seeded by `seed`.
fn shuffled_classes(ds: &Dataset, seed: u64) -> [(Label, Vec<usize>); 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    [Label::Plus, Label::Minus].map(|label| {
        let mut idx: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] == label).collect();
        idx.shuffle(&mut rng);
        (label, idx)
    })
}

/// Stratified split; each class contributes `round(train_frac · count)`
/// points to the training side. Both sides keep the original row order.
pub fn split_train_test(ds: &Dataset, train_frac: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(EsmError::InvalidArgument("train fraction must lie in (0, 1)".into()));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (label, idx) in shuffled_classes(ds, seed) {
        let n_train = (train_frac * idx.len() as f64).round() as usize;
        if n_train == 0 || n_train == idx.len() {
            return Err(EsmError::ClassTooSmall { label: label.as_i8(), count: idx.len() });
        }
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.subset(&train), ds.subset(&test)))
}

/// Fold number of every row for stratified `k`-fold cross-validation: each
/// class is shuffled and dealt round-robin over the folds.
pub fn stratified_folds(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(EsmError::InvalidArgument("need at least 2 folds".into()));
    }
    let mut fold = vec![0; ds.len()];
    for (label, idx) in shuffled_classes(ds, seed) {
        if idx.len() < k {
            return Err(EsmError::ClassTooSmall { label: label.as_i8(), count: idx.len() });
        }
        for (pos, &i) in idx.iter().enumerate() {
            fold[i] = pos % k;
        }
    }
    Ok(fold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn balanced(n_plus: usize, n_minus: usize) -> Dataset {
        let labels: Vec<Label> =
            (0..n_plus).map(|_| Label::Plus).chain((0..n_minus).map(|_| Label::Minus)).collect();
        let points = (0..labels.len()).map(|i| vec![i as f64]).collect();
        Dataset::new(points, labels, 1, "t").unwrap()
    }

    #[test]
    fn seventy_thirty() {
        let (tr, te) = split_train_test(&balanced(50, 50), 0.7, 1).unwrap();
        assert_eq!(tr.class_counts(), (35, 35));
        assert_eq!(te.class_counts(), (15, 15));
    }

    #[test]
    fn heart_counts() {
        let (tr, te) = split_train_test(&balanced(150, 120), 0.7, 3).unwrap();
        assert_eq!((tr.len(), te.len()), (189, 81));
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let ds = balanced(20, 13);
        let (a, b) = split_train_test(&ds, 0.6, 9).unwrap();
        assert_eq!((a.clone(), b.clone()), split_train_test(&ds, 0.6, 9).unwrap());
        let mut all: Vec<f64> = a.points.iter().chain(&b.points).map(|p| p[0]).collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..33).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn tiny_class_fails() {
        assert!(matches!(split_train_test(&balanced(10, 1), 0.7, 0), Err(EsmError::ClassTooSmall { label: -1, .. })));
    }

    #[test]
    fn folds_are_stratified() {
        let ds = balanced(45, 45);
        let folds = stratified_folds(&ds, 3, 4).unwrap();
        for f in 0..3 {
            let plus = (0..45).filter(|&i| folds[i] == f).count();
            let minus = (45..90).filter(|&i| folds[i] == f).count();
            assert_eq!((plus, minus), (15, 15));
        }
        assert_eq!(folds, stratified_folds(&ds, 3, 4).unwrap());
        assert!(stratified_folds(&balanced(2, 5), 3, 0).is_err());
    }
}
