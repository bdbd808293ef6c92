//! Test-only reference implementations, written without reusing the
//! library's forward pass or coalition code.
#![allow(dead_code)]

use aeshap_core::data::Dataset;
use aeshap_core::explain::BackgroundSet;
use aeshap_core::neural::{self, Activation, Autoencoder, AutoencoderConfig};
use aeshap_core::seed;
use rand::Rng;

pub fn random_rows(n: usize, d: usize, seed: u64) -> Vec<f64> {
    let mut rng = seed::rng(seed);
    (0..n * d).map(|_| rng.random_range(-2.0..2.0)).collect()
}

/// A small autoencoder trained for a few epochs on random data.
pub fn tiny_trained_model(d: usize, hidden: &[usize], seed: u64) -> Autoencoder {
    let mut cfg = AutoencoderConfig::with_hidden(d, hidden);
    cfg.epochs = 3;
    cfg.batch_size = 16;
    cfg.learning_rate = 1e-2;
    cfg.seed = seed;
    let train = Dataset::from_rows(&chunk(&random_rows(64, d, seed ^ 1), d), None).unwrap();
    let val = Dataset::from_rows(&chunk(&random_rows(16, d, seed ^ 2), d), None).unwrap();
    let mut model = neural::init_model(&cfg).unwrap();
    neural::fit(&mut model, &train, &val, &cfg).unwrap();
    model
}

pub fn chunk(values: &[f64], d: usize) -> Vec<Vec<f64>> {
    values.chunks(d).map(<[f64]>::to_vec).collect()
}

/// Reconstruction error `mean_j (f(x)_j - x_j)^2` by a naive forward pass.
pub fn oracle_error(model: &Autoencoder, x: &[f64]) -> f64 {
    let mut a = x.to_vec();
    for layer in model.layers() {
        let mut next = Vec::with_capacity(layer.n_out);
        for o in 0..layer.n_out {
            let mut z = layer.biases[o];
            for i in 0..layer.n_in {
                z += layer.weights[o * layer.n_in + i] * a[i];
            }
            next.push(match layer.activation {
                Activation::Relu => z.max(0.0),
                Activation::Linear => z,
            });
        }
        a = next;
    }
    a.iter().zip(x).map(|(r, v)| (r - v) * (r - v)).sum::<f64>() / x.len() as f64
}

/// `v(S)` for a coalition given as a bitmask.
pub fn oracle_value(model: &Autoencoder, x: &[f64], mask: usize, bg: &BackgroundSet) -> f64 {
    let d = x.len();
    if mask == (1 << d) - 1 {
        return oracle_error(model, x);
    }
    let rows = bg.rows().chunks(d);
    let n = rows.len() as f64;
    rows.map(|b| {
        let z: Vec<f64> = (0..d).map(|j| if mask >> j & 1 == 1 { x[j] } else { b[j] }).collect();
        oracle_error(model, &z)
    })
    .sum::<f64>()
        / n
}

/// Shapley values as the average marginal contribution over all `d!`
/// feature orderings (Heap's algorithm), with `v` tabulated per mask.
pub fn permutation_shapley(model: &Autoencoder, x: &[f64], bg: &BackgroundSet) -> Vec<f64> {
    let d = x.len();
    let v: Vec<f64> = (0..1usize << d).map(|m| oracle_value(model, x, m, bg)).collect();
    let mut perm: Vec<usize> = (0..d).collect();
    let mut totals = vec![0.0; d];
    let mut count = 0u64;
    let mut visit = |p: &[usize]| {
        let mut mask = 0usize;
        for &i in p {
            totals[i] += v[mask | 1 << i] - v[mask];
            mask |= 1 << i;
        }
        count += 1;
    };
    let mut c = vec![0usize; d];
    visit(&perm);
    let mut i = 1;
    while i < d {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    totals.iter().map(|t| t / count as f64).collect()
}

/// Count-based AUC: fraction of (positive, negative) pairs ranked correctly,
/// ties counting one half.
pub fn pair_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let (mut good, mut pairs) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                good += 1.0;
            } else if si == sj {
                good += 0.5;
            }
        }
    }
    good / pairs
}

/// Pearson coefficient from raw sums.
pub fn naive_pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    let saa: f64 = a.iter().map(|v| v * v).sum();
    let sbb: f64 = b.iter().map(|v| v * v).sum();
    let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (n * sab - sa * sb) / ((n * saa - sa * sa).sqrt() * (n * sbb - sb * sb).sqrt())
}

/// Ten columns: six random, then an exact duplicate, a scaled copy, a linear
/// combination and a negated copy. Returns the data and the planted
/// duplicate pairs `(original, copy)`.
pub fn planted_dataset(seed: u64) -> (Dataset, Vec<(usize, usize)>) {
    let mut rng = seed::rng(seed);
    let n = 60;
    let base: Vec<Vec<f64>> = (0..6).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let p: Vec<usize> = (0..5).map(|_| rng.random_range(0..6)).collect();
    let (a, b, c, e, f) = (p[0], p[1], p[2], p[3], p[4]);
    let scale = rng.random_range(0.5..3.0);
    let mut cols = base.clone();
    cols.push(base[a].clone());
    cols.push(base[b].iter().map(|v| scale * v + 1.0).collect());
    cols.push(base[c].iter().zip(&base[e]).map(|(x, y)| x + 0.3 * y).collect());
    cols.push(base[f].iter().map(|v| -v).collect());
    let rows: Vec<Vec<f64>> = (0..n).map(|i| cols.iter().map(|col| col[i]).collect()).collect();
    (Dataset::from_rows(&rows, None).unwrap(), vec![(a, 6)])
}

/// Transcription of the published loop: a boolean per column, every column
/// `i` (kept or not) clears each later `j` with `corr[i][j] >= threshold`.
pub fn filter_literal(corr: &[Vec<f64>], threshold: f64) -> Vec<usize> {
    let n = corr.len();
    let mut cols = vec![true; n];
    for i in 0..n {
        for j in i + 1..n {
            if corr[i][j] >= threshold && cols[j] {
                cols[j] = false;
            }
        }
    }
    (0..n).filter(|&j| cols[j]).collect()
}

/// Column `j` survives iff no earlier surviving column reaches the threshold with it.
pub fn filter_kept_only(corr: &[Vec<f64>], threshold: f64) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for j in 0..corr.len() {
        if kept.iter().all(|&i| corr[i][j] < threshold) {
            kept.push(j);
        }
    }
    kept
}

pub fn full_correlation(d: &Dataset) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<f64>> = (0..d.n_cols()).map(|j| d.column(j)).collect();
    cols.iter().map(|a| cols.iter().map(|b| naive_pearson(a, b)).collect()).collect()
}
