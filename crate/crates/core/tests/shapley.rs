mod common;

use aeshap_core::explain::{self, BackgroundSet, Coalition};
use aeshap_core::neural::{Activation, Autoencoder, Dense};
use aeshap_core::Error;
use common::*;
use proptest::prelude::*;

fn background(b: usize, d: usize, seed: u64) -> BackgroundSet {
    BackgroundSet::new(random_rows(b, d, seed), d).unwrap()
}

#[test]
fn exact_matches_permutation_average() {
    for (k, d) in [3usize, 4, 5, 6, 7].into_iter().enumerate() {
        let model = tiny_trained_model(d, &[5, 2, 5], 100 + k as u64);
        let bg = background(4, d, 200 + k as u64);
        let x = random_rows(1, d, 300 + k as u64);
        let exact = explain::exact_shapley(&model, &x, &bg).unwrap();
        let oracle = permutation_shapley(&model, &x, &bg);
        for (a, b) in exact.attributions.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9, "d={d}: {a} vs {b}");
        }
        assert!((exact.base_value - oracle_value(&model, &x, 0, &bg)).abs() < 1e-12);
        assert!((exact.model_output - oracle_error(&model, &x)).abs() < 1e-12);
        assert!(exact.local_accuracy_gap().abs() < 1e-9);
    }
}

#[test]
fn marginal_value_matches_naive_hybrids() {
    let d = 6;
    let model = tiny_trained_model(d, &[4, 3, 4], 7);
    let bg = background(5, d, 8);
    let x = random_rows(1, d, 9);
    for mask in [0usize, 1, 0b101010, 0b011111, 0b111111] {
        let present: Vec<usize> = (0..d).filter(|j| mask >> j & 1 == 1).collect();
        let c = Coalition::from_indices(d, &present);
        let v = explain::marginal_value(&model, &x, &c, &bg).unwrap();
        assert!((v - oracle_value(&model, &x, mask, &bg)).abs() < 1e-12);
    }
}

#[test]
fn complete_kernel_matches_exact() {
    for d in 2..=9usize {
        let model = tiny_trained_model(d, &[6, 3, 6], 40 + d as u64);
        let bg = background(8, d, 50 + d as u64);
        let x = random_rows(1, d, 60 + d as u64);
        let exact = explain::exact_shapley(&model, &x, &bg).unwrap();
        let kernel = explain::kernel_shap_explain(&model, &x, &bg, (1 << d) - 2, 1).unwrap();
        for (a, b) in kernel.attributions.iter().zip(&exact.attributions) {
            assert!((a - b).abs() < 1e-6, "d={d}: {a} vs {b}");
        }
    }
}

#[test]
fn sampled_kernel_is_close_to_exact() {
    let d = 12;
    let model = tiny_trained_model(d, &[8, 4, 8], 5);
    let bg = background(8, d, 6);
    let x = random_rows(1, d, 7);
    let exact = explain::exact_shapley(&model, &x, &bg).unwrap();
    let sampled = explain::kernel_shap_explain(&model, &x, &bg, 2000, 3).unwrap();
    let scale = exact.attributions.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    for (a, b) in sampled.attributions.iter().zip(&exact.attributions) {
        assert!((a - b).abs() < 0.05 * scale, "{a} vs {b} (scale {scale})");
    }
    assert!(sampled.local_accuracy_gap().abs() < 1e-9);
}

#[test]
fn feature_fixed_everywhere_gets_nothing() {
    let d = 6;
    let model = tiny_trained_model(d, &[5, 3, 5], 11);
    let mut rows = random_rows(10, d, 12);
    let mut x = random_rows(1, d, 13);
    x[2] = 0.75;
    for r in rows.chunks_mut(d) {
        r[2] = 0.75;
    }
    let bg = BackgroundSet::new(rows, d).unwrap();
    let e = explain::exact_shapley(&model, &x, &bg).unwrap();
    assert!(e.attributions[2].abs() < 1e-9);
}

/// Features 1 and 3 enter the network through identical weights and are
/// reconstructed by identical output units.
fn model_symmetric_in_1_and_3() -> Autoencoder {
    let d = 5;
    let mut w1 = random_rows(4, d, 21);
    for r in w1.chunks_mut(d) {
        r[3] = r[1];
    }
    let b1 = random_rows(1, 4, 22);
    let mut w2 = random_rows(d, 4, 23);
    let copy: Vec<f64> = w2[4..8].to_vec();
    w2[12..16].copy_from_slice(&copy);
    let mut b2 = random_rows(1, d, 24);
    b2[3] = b2[1];
    Autoencoder::from_layers(vec![
        Dense { n_in: d, n_out: 4, weights: w1, biases: b1, activation: Activation::Relu },
        Dense { n_in: 4, n_out: d, weights: w2, biases: b2, activation: Activation::Linear },
    ])
    .unwrap()
}

#[test]
fn interchangeable_features_share_credit() {
    let d = 5;
    let model = model_symmetric_in_1_and_3();
    let mut rows = random_rows(6, d, 25);
    for r in rows.chunks_mut(d) {
        r[3] = r[1];
    }
    let mut x = random_rows(1, d, 26);
    x[3] = x[1];
    let bg = BackgroundSet::new(rows, d).unwrap();
    let e = explain::exact_shapley(&model, &x, &bg).unwrap();
    assert!((e.attributions[1] - e.attributions[3]).abs() < 1e-9);
    let k = explain::kernel_shap_explain(&model, &x, &bg, 30, 0).unwrap();
    assert!((k.attributions[1] - k.attributions[3]).abs() < 1e-9);
}

#[test]
fn errors_name_the_problem() {
    let model = tiny_trained_model(4, &[3], 1);
    let bg = background(2, 4, 2);
    let wide = vec![0.0; 5];
    assert!(matches!(
        explain::exact_shapley(&model, &wide, &bg),
        Err(Error::DimensionMismatch { expected: 4, actual: 5, .. })
    ));
    let bg5 = background(2, 5, 3);
    assert!(explain::kernel_shap_explain(&model, &[0.0; 4], &bg5, 64, 0).is_err());
    let big = tiny_trained_model(16, &[3], 1);
    let bg16 = background(1, 16, 4);
    assert!(matches!(
        explain::exact_shapley(&big, &[0.0; 16], &bg16),
        Err(Error::EnumerationCap { features: 16, cap: 15 })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn local_accuracy_in_every_mode(seed in 0u64..1000, d in 2usize..14, budget in 30usize..400, b in 1usize..6) {
        let model = tiny_trained_model(d, &[4, 2, 4], seed);
        let bg = background(b, d, seed + 1);
        let x = random_rows(1, d, seed + 2);
        let e = explain::kernel_shap_explain(&model, &x, &bg, budget.max(2 * d), seed).unwrap();
        prop_assert!(e.local_accuracy_gap().abs() < 1e-9);
        prop_assert!((e.model_output - oracle_error(&model, &x)).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_deterministic_under_seed(seed in 0u64..1000) {
        let d = 11;
        let model = tiny_trained_model(d, &[4], seed);
        let bg = background(3, d, seed + 1);
        let x = random_rows(1, d, seed + 2);
        let a = explain::kernel_shap_explain(&model, &x, &bg, 100, seed).unwrap();
        let b = explain::kernel_shap_explain(&model, &x, &bg, 100, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
