use esm_core::classifier::{Label, TrainedModel};
use esm_core::geometry::{CenteredEllipsoid, HomEllipsoid};
use esm_core::training::{build_pairs, compute_bounds};
use esm_core::SymMat;
use proptest::prelude::*;

fn pd_matrix(n: usize) -> impl Strategy<Value = SymMat> {
    (prop::collection::vec(-1.0..1.0f64, n * n), 0.1..1.0f64).prop_map(move |(b, shift)| {
        SymMat::from_fn(n, |i, j| {
            (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum::<f64>() + if i == j { shift } else { 0.0 }
        })
    })
}

fn points(n: usize, k: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-4.0..4.0f64, n), k)
}

fn model_case() -> impl Strategy<Value = (TrainedModel, Vec<Vec<f64>>)> {
    (1usize..4).prop_flat_map(|n| {
        (pd_matrix(n), prop::collection::vec(-1.0..1.0f64, n), points(n, 1..8), points(n, 1..8), points(n, 1..20))
            .prop_filter_map("degenerate", |(s, c, plus, minus, queries)| {
                let e = CenteredEllipsoid::new(s, c).ok()?;
                let m = TrainedModel::from_training(e, &plus, &minus, 0.5).ok()?;
                (!m.is_degenerate()).then_some((m, queries))
            })
    })
}

proptest! {
    #[test]
    fn scores_are_antisymmetric((model, queries) in model_case()) {
        for z in &queries {
            let s = model.separation_counts(z).unwrap();
            prop_assert_eq!(s.r_plus + s.r_minus, 0.0);
            prop_assert!((-1.0..=1.0).contains(&s.r_plus));
        }
    }

    #[test]
    fn inside_points_are_rejected((model, queries) in model_case()) {
        for z in queries.iter().chain(std::iter::once(&model.ellipsoid().center().to_vec())) {
            if model.ellipsoid().contains(z) {
                prop_assert_eq!(model.predict(z).unwrap(), Label::Rejected);
            }
        }
    }

    #[test]
    fn raising_threshold_shrinks_classified_set((model, queries) in model_case(), lo in 0.05..1.0f64, t in 0.0..1.0f64) {
        let hi = lo + (1.0 - lo) * t;
        let loose = model.with_eps_cls(lo).unwrap();
        let strict = model.with_eps_cls(hi).unwrap();
        for z in &queries {
            let s = strict.predict(z).unwrap();
            if s != Label::Rejected {
                prop_assert_eq!(loose.predict(z).unwrap(), s);
            }
        }
    }

    #[test]
    fn lifting_round_trip(s in pd_matrix(3), c in prop::collection::vec(-3.0..3.0f64, 3)) {
        let lifted = HomEllipsoid::from_centered(&s, &c).unwrap();
        let back = lifted.to_centered().unwrap();
        for (a, b) in back.center().iter().zip(&c) {
            prop_assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()));
        }
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((back.shape().get(i, j) - s.get(i, j)).abs() <= 1e-8 * (1.0 + s.get(i, j).abs()));
            }
        }
    }

    #[test]
    fn bounds_are_nonnegative_and_tight(plus in points(2, 1..5), minus in points(2, 1..5)) {
        let ps = build_pairs(&plus, &minus).unwrap();
        let b = compute_bounds(&ps);
        prop_assert!(b.u_beta.iter().chain(&b.u_nu_plus).chain(&b.u_nu_minus).all(|&u| u >= 0.0));
        prop_assert!(b.u_beta.iter().any(|&u| u == 0.0));
        prop_assert!(b.u_nu_plus.iter().chain(&b.u_nu_minus).any(|&u| u == 0.0));
    }
}
