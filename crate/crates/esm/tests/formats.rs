use esm::data::{parse_svmlight, write_svmlight, Dataset, MinMaxScaler};
use esm::model_file::{ModelFile, SCHEMA_VERSION};
use esm::EsmError;
use esm_core::geometry::CenteredEllipsoid;
use esm_core::{Hyperparams, Label, SymMat, TrainedModel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dataset() -> impl Strategy<Value = Dataset> {
    (1usize..8, 1usize..30).prop_flat_map(|(dim, n)| {
        let value = prop_oneof![Just(0.0), -1e3..1e3f64, any::<f64>().prop_filter("finite", |v| v.is_finite())];
        (prop::collection::vec(prop::collection::vec(value, dim), n), prop::collection::vec(any::<bool>(), n))
            .prop_map(move |(points, signs)| {
                let labels = signs.into_iter().map(|s| if s { Label::Plus } else { Label::Minus }).collect();
                Dataset::new(points, labels, dim, "").unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn writer_output_parses_back(ds in dataset()) {
        let mut buf = Vec::new();
        write_svmlight(&ds, &mut buf).unwrap();
        prop_assert_eq!(parse_svmlight(buf.as_slice(), false).unwrap(), ds);
    }
}

#[test]
fn heart_shaped_fixture_dimensions() {
    let text = include_str!("fixtures/heart_shaped.svm");
    let ds = parse_svmlight(text.as_bytes(), false).unwrap();
    assert_eq!((ds.len(), ds.feature_dim), (270, 13));
    assert_eq!(ds.class_counts(), (120, 150));
}

fn random_model(rng: &mut ChaCha8Rng, n: usize, inside_all_plus: bool) -> TrainedModel {
    let b: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let shape = SymMat::from_fn(n, |i, j| {
        (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum::<f64>() / n as f64 + if i == j { 0.05 } else { 0.0 }
    });
    let center: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let e = CenteredEllipsoid::new(shape, center.clone()).unwrap();
    let cloud = |rng: &mut ChaCha8Rng, k: usize, scale: f64| -> Vec<Vec<f64>> {
        (0..k).map(|_| center.iter().map(|c| c + rng.random_range(-scale..scale)).collect()).collect()
    };
    let plus = if inside_all_plus { vec![center.clone()] } else { cloud(rng, 12, 30.0) };
    let minus = cloud(rng, 12, 30.0);
    TrainedModel::from_training(e, &plus, &minus, 0.37).unwrap()
}

fn round_trip(file: &ModelFile) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    file.save(&path).unwrap();
    let back = ModelFile::load(&path).unwrap();
    assert_eq!(&back, file);
    assert_eq!(back.to_json(), file.to_json());
}

#[test]
fn model_files_round_trip_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let hp = Hyperparams { c1: 0.001, c4: 1.0 / 3.0, max_pairs: Some(17), ..Hyperparams::default() };
    let trivial = TrainedModel::from_training(
        CenteredEllipsoid::new(SymMat::identity(2), vec![0.0, 0.0]).unwrap(),
        &[vec![2.0, 0.0]],
        &[vec![-2.0, 0.0]],
        0.5,
    )
    .unwrap();
    round_trip(&ModelFile { model: trivial, hyperparams: hp.clone(), scaler: None });

    let degenerate = random_model(&mut rng, 3, true);
    assert!(degenerate.is_degenerate());
    round_trip(&ModelFile { model: degenerate, hyperparams: hp.clone(), scaler: None });

    for _ in 0..5 {
        let model = random_model(&mut rng, 34, false);
        let scaler = MinMaxScaler {
            min: (0..34).map(|_| rng.random_range(-1.0..0.0)).collect(),
            max: (0..34).map(|_| rng.random_range(0.0..1.0)).collect(),
        };
        round_trip(&ModelFile { model, hyperparams: hp.clone(), scaler: Some(scaler) });
    }
}

#[test]
fn bad_model_files_are_rejected() {
    let model = TrainedModel::from_training(
        CenteredEllipsoid::new(SymMat::identity(1), vec![0.0]).unwrap(),
        &[vec![2.0]],
        &[vec![-2.0]],
        0.5,
    )
    .unwrap();
    let text = ModelFile { model, hyperparams: Hyperparams::default(), scaler: None }.to_json();
    let newer = text.replace(&format!("\"schema\": {SCHEMA_VERSION}"), "\"schema\": 99");
    assert!(matches!(ModelFile::from_json(&newer), Err(EsmError::SchemaMismatch { found: 99, .. })));
    assert!(matches!(ModelFile::from_json("{"), Err(EsmError::CorruptFile(_))));
    let inside = text.replace("[\n    [\n      2.0\n    ]\n  ]", "[\n    [\n      0.5\n    ]\n  ]");
    assert_ne!(inside, text);
    assert!(matches!(ModelFile::from_json(&inside), Err(EsmError::CorruptFile(_))));
    let flag = text.replace("\"degenerate\": false", "\"degenerate\": true");
    assert!(matches!(ModelFile::from_json(&flag), Err(EsmError::CorruptFile(_))));
}
