//! Shapley attribution of the autoencoder reconstruction error.
//!
//! The game being explained is the marginalization value function: for a
//! coalition `S` of present features, `v(S)` is the mean reconstruction error
//! over background rows `b` of the hybrid instance that takes `x` on `S` and
//! `b` elsewhere. Absent features are thus integrated out under their
//! marginal (benign) distribution rather than a conditional one.
//!
//! Two solvers share that value function:
//!
//! * [`exact_shapley`] enumerates all `2^d` coalitions and applies the
//!   classic weighted-difference formula. Used as the oracle.
//! * [`kernel_shap_explain`] fits the additive model `g(z) = phi0 + sum z_i phi_i`
//!   by Shapley-kernel weighted least squares over enumerated or sampled
//!   coalitions, with `g(empty) = v(empty)` and `g(full) = f(x)` imposed as
//!   equality constraints. With every coalition enumerated it reproduces the
//!   exact values.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::neural::Autoencoder;
use crate::seed;

/// Largest feature count accepted by [`exact_shapley`] by default.
pub const DEFAULT_EXACT_CAP: usize = 15;

/// Coalition budget used when none is configured.
pub const DEFAULT_BUDGET: usize = 2048;

/// Tikhonov term added to the normal equations.
pub const RIDGE: f64 = 1e-10;

/// Scaled benign rows supplying values for absent features.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundSet {
    rows: Vec<f64>,
    dim: usize,
}

impl BackgroundSet {
    pub fn new(rows: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || rows.is_empty() {
            return Err(Error::EmptyInput("background set"));
        }
        if rows.len() % dim != 0 {
            return Err(Error::DimensionMismatch { what: "background rows", expected: dim, actual: rows.len() % dim });
        }
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("background set holds non-finite values".into()));
        }
        Ok(Self { rows, dim })
    }

    pub fn from_dataset(d: &Dataset) -> Result<Self> {
        Self::new(d.values().to_vec(), d.n_cols())
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }
}

/// Which features take the explained instance's values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Coalition {
    pub mask: Vec<bool>,
}

impl Coalition {
    pub fn empty(m: usize) -> Self {
        Self { mask: vec![false; m] }
    }

    pub fn full(m: usize) -> Self {
        Self { mask: vec![true; m] }
    }

    pub fn from_indices(m: usize, present: &[usize]) -> Self {
        let mut mask = vec![false; m];
        for &i in present {
            mask[i] = true;
        }
        Self { mask }
    }

    pub fn size(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Self {
        Self { mask: self.mask.iter().map(|b| !b).collect() }
    }
}

/// One additive explanation: `base_value + sum(attributions) = model_output`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapExplanation {
    pub base_value: f64,
    pub attributions: Vec<f64>,
    pub model_output: f64,
    pub instance_index: Option<usize>,
}

impl ShapExplanation {
    /// `base_value + sum(attributions) - model_output`.
    pub fn local_accuracy_gap(&self) -> f64 {
        self.base_value + self.attributions.iter().sum::<f64>() - self.model_output
    }
}

/// Evaluates `v(S)` for one instance, reusing the hybrid buffer.
struct ValueFunction<'a> {
    model: &'a Autoencoder,
    x: &'a [f64],
    background: &'a BackgroundSet,
    hybrid: Vec<f64>,
}

impl<'a> ValueFunction<'a> {
    fn new(model: &'a Autoencoder, x: &'a [f64], background: &'a BackgroundSet) -> Result<Self> {
        let d = model.input_dim();
        if x.len() != d {
            return Err(Error::DimensionMismatch { what: "explained instance", expected: d, actual: x.len() });
        }
        if background.dim() != d {
            return Err(Error::DimensionMismatch { what: "background width", expected: d, actual: background.dim() });
        }
        Ok(Self { model, x, background, hybrid: background.rows().to_vec() })
    }

    fn instance_error(&self) -> f64 {
        self.model.row_errors(self.x)[0]
    }

    fn eval(&mut self, present: impl Fn(usize) -> bool) -> f64 {
        let d = self.x.len();
        if (0..d).all(&present) {
            return self.instance_error();
        }
        self.hybrid.copy_from_slice(self.background.rows());
        for row in self.hybrid.chunks_exact_mut(d) {
            for (j, v) in row.iter_mut().enumerate() {
                if present(j) {
                    *v = self.x[j];
                }
            }
        }
        let errors = self.model.row_errors(&self.hybrid);
        errors.iter().sum::<f64>() / errors.len() as f64
    }
}

/// Mean reconstruction error over background rows of the hybrid instance
/// that takes `x` on the coalition and the background row elsewhere.
/// The full coalition returns the error of `x` itself.
pub fn marginal_value(model: &Autoencoder, x: &[f64], coalition: &Coalition, background: &BackgroundSet) -> Result<f64> {
    let mut v = ValueFunction::new(model, x, background)?;
    if coalition.mask.len() != x.len() {
        return Err(Error::DimensionMismatch { what: "coalition length", expected: x.len(), actual: coalition.mask.len() });
    }
    Ok(v.eval(|j| coalition.mask[j]))
}

/// Exact Shapley values by enumerating all `2^d` coalitions.
pub fn exact_shapley(model: &Autoencoder, x: &[f64], background: &BackgroundSet) -> Result<ShapExplanation> {
    exact_shapley_capped(model, x, background, DEFAULT_EXACT_CAP)
}

pub fn exact_shapley_capped(
    model: &Autoencoder,
    x: &[f64],
    background: &BackgroundSet,
    cap: usize,
) -> Result<ShapExplanation> {
    let d = x.len();
    if d > cap || d >= 63 {
        return Err(Error::EnumerationCap { features: d, cap });
    }
    let mut vf = ValueFunction::new(model, x, background)?;
    let n_masks = 1usize << d;
    let values: Vec<f64> = (0..n_masks).map(|mask| vf.eval(|j| mask >> j & 1 == 1)).collect();

    // |S|! (d - |S| - 1)! / d! == 1 / (d * C(d-1, |S|))
    let weights: Vec<f64> = (0..d).map(|s| 1.0 / (d as f64 * binomial(d - 1, s))).collect();
    let mut phi = vec![0.0; d];
    for (i, p) in phi.iter_mut().enumerate() {
        let bit = 1usize << i;
        let mut acc = 0.0;
        for mask in (0..n_masks).filter(|m| m & bit == 0) {
            acc += weights[mask.count_ones() as usize] * (values[mask | bit] - values[mask]);
        }
        *p = acc;
    }
    Ok(ShapExplanation {
        base_value: values[0],
        attributions: phi,
        model_output: values[n_masks - 1],
        instance_index: None,
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(acc)
}

/// Shapley kernel weight `(M - 1) / (C(M, s) * s * (M - s))` for `0 < s < M`.
pub fn shapley_kernel_weight(m: usize, s: usize) -> Result<f64> {
    if s == 0 || s >= m {
        return Err(Error::InvalidParameter(alloc::format!(
            "kernel weight is infinite for coalition size {s} of {m}; handled as a constraint"
        )));
    }
    Ok((m - 1) as f64 / (binomial(m, s) * s as f64 * (m - s) as f64))
}

/// Coalitions fed to the kernel regression, with their regression weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionSample {
    pub coalitions: Vec<Coalition>,
    pub weights: Vec<f64>,
    /// Every non-trivial coalition is present with its exact kernel weight.
    pub complete: bool,
}

impl CoalitionSample {
    pub fn len(&self) -> usize {
        self.coalitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coalitions.is_empty()
    }
}

fn all_of_size(m: usize, s: usize, out: &mut Vec<Coalition>) {
    let mut idx: Vec<usize> = (0..s).collect();
    loop {
        out.push(Coalition::from_indices(m, &idx));
        let mut k = s;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if idx[k] != k + m - s {
                break;
            }
            if k == 0 {
                return;
            }
        }
        idx[k] += 1;
        for t in k + 1..s {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// Chooses coalitions for a budget of `budget` value evaluations.
///
/// When `2^M - 2 <= budget` every non-trivial coalition is enumerated.
/// Otherwise sizes are taken in pairs `(s, M - s)` from the outside in and
/// enumerated in full while the budget share of their kernel mass covers
/// them; the rest of the budget is filled by seeded sampling of sizes in
/// proportion to their remaining kernel mass, each draw paired with its
/// complement. Repeated draws raise a coalition's weight instead of adding
/// a new row.
pub fn sample_coalitions(m: usize, budget: usize, seed: u64) -> Result<CoalitionSample> {
    if budget < 2 {
        return Err(Error::InvalidParameter(alloc::format!("coalition budget must be >= 2, got {budget}")));
    }
    let total = if m >= 63 { usize::MAX } else { (1usize << m).saturating_sub(2) };
    let mut coalitions = Vec::new();
    let mut weights = Vec::new();
    if total <= budget {
        for s in 1..m {
            let w = shapley_kernel_weight(m, s)?;
            let start = coalitions.len();
            all_of_size(m, s, &mut coalitions);
            weights.resize(coalitions.len(), w);
            debug_assert_eq!(coalitions.len() - start, binomial(m, s) as usize);
        }
        return Ok(CoalitionSample { coalitions, weights, complete: true });
    }

    let n_sizes = m / 2; // s = 1..=n_sizes covers (s, m-s)
    let paired = |s: usize| 2 * s != m;
    // Kernel mass of a size (and its complement when paired).
    let mass: Vec<f64> = (0..=n_sizes)
        .map(|s| {
            if s == 0 {
                return 0.0;
            }
            let one = (m - 1) as f64 / (s * (m - s)) as f64;
            if paired(s) {
                2.0 * one
            } else {
                one
            }
        })
        .collect();

    let mut left = budget;
    let mut mass_left: f64 = mass.iter().sum();
    let mut first_open = n_sizes + 1;
    #[allow(clippy::needless_range_loop)]
    for s in 1..=n_sizes {
        let count = binomial(m, s) * if paired(s) { 2.0 } else { 1.0 };
        if left as f64 * (mass[s] / mass_left) / count < 1.0 - 1e-8 {
            first_open = s;
            break;
        }
        let w = shapley_kernel_weight(m, s)?;
        let start = coalitions.len();
        all_of_size(m, s, &mut coalitions);
        if paired(s) {
            let comps: Vec<Coalition> = coalitions[start..].iter().map(Coalition::complement).collect();
            coalitions.extend(comps);
        }
        weights.resize(coalitions.len(), w);
        left -= count as usize;
        mass_left -= mass[s];
    }

    if first_open <= n_sizes && left > 0 {
        let mut rng = seed::rng(seed);
        let open_mass: Vec<f64> = (first_open..=n_sizes).map(|s| mass[s]).collect();
        let open_total: f64 = open_mass.iter().sum();
        let mut counts: BTreeMap<Coalition, f64> = BTreeMap::new();
        let mut order: Vec<Coalition> = Vec::new();
        let mut draws = 0.0;
        let max_attempts = 100 * left + 1000;
        let mut attempts = 0;
        while order.len() < left && attempts < max_attempts {
            attempts += 1;
            let mut u = rng.random::<f64>() * open_total;
            let mut size = n_sizes;
            for (k, w) in open_mass.iter().enumerate() {
                if u < *w {
                    size = first_open + k;
                    break;
                }
                u -= w;
            }
            let mut picked = index::sample(&mut rng, m, size).into_vec();
            picked.sort_unstable();
            let c = Coalition::from_indices(m, &picked);
            let comp = c.complement();
            for coalition in [c, comp] {
                match counts.get_mut(&coalition) {
                    Some(n) => *n += 1.0,
                    None => {
                        if order.len() == left {
                            continue;
                        }
                        counts.insert(coalition.clone(), 1.0);
                        order.push(coalition);
                    }
                }
                draws += 1.0;
            }
        }
        for c in order {
            let n = counts[&c];
            weights.push(mass_left * n / draws);
            coalitions.push(c);
        }
    }
    Ok(CoalitionSample { coalitions, weights, complete: false })
}

/// Kernel SHAP explanation of one instance.
///
/// Enumerates every coalition when `2^d - 2 <= budget`, otherwise samples
/// `budget` of them. A coalition and its complement constrain the same
/// direction, so sampling needs `budget >= 2d` to have a chance of full
/// rank. A singular system is retried once with a fresh sampling seed.
pub fn kernel_shap_explain(
    model: &Autoencoder,
    x: &[f64],
    background: &BackgroundSet,
    budget: usize,
    seed: u64,
) -> Result<ShapExplanation> {
    let d = x.len();
    if d == 0 {
        return Err(Error::EmptyInput("explained instance has no features"));
    }
    let mut vf = ValueFunction::new(model, x, background)?;
    let base_value = vf.eval(|_| false);
    let model_output = vf.instance_error();
    let delta = model_output - base_value;
    if d == 1 {
        return Ok(ShapExplanation { base_value, attributions: vec![delta], model_output, instance_index: None });
    }
    let complete_mode = d < 63 && (1usize << d) - 2 <= budget;
    if !complete_mode && budget < 2 * d {
        return Err(Error::InvalidParameter(alloc::format!(
            "sampled kernel SHAP over {d} features needs a budget of at least {}, got {budget}",
            2 * d
        )));
    }

    let mut attempt_seed = seed;
    for attempt in 0..2 {
        let sample = sample_coalitions(d, budget, attempt_seed)?;
        let values: Vec<f64> = sample.coalitions.iter().map(|c| vf.eval(|j| c.mask[j])).collect();
        if let Some(phi) = constrained_fit(&sample, &values, base_value, delta, d) {
            return Ok(ShapExplanation { base_value, attributions: phi, model_output, instance_index: None });
        }
        if sample.complete || attempt == 1 {
            break;
        }
        attempt_seed = seed::derive_indexed(seed, 1);
    }
    Err(Error::SingularSystem { dim: d - 1 })
}

/// Weighted least squares of `v(S) - phi0` on the coalition indicators with
/// `sum(phi) = delta` enforced by eliminating the last attribution.
fn constrained_fit(sample: &CoalitionSample, values: &[f64], base_value: f64, delta: f64, d: usize) -> Option<Vec<f64>> {
    let p = d - 1;
    let mut normal = vec![0.0; p * p];
    let mut rhs = vec![0.0; p];
    let mut row = vec![0.0; p];
    for ((c, &w), &v) in sample.coalitions.iter().zip(&sample.weights).zip(values) {
        let last = if c.mask[p] { 1.0 } else { 0.0 };
        for (i, r) in row.iter_mut().enumerate() {
            *r = (if c.mask[i] { 1.0 } else { 0.0 }) - last;
        }
        let target = v - base_value - last * delta;
        for i in 0..p {
            if row[i] == 0.0 {
                continue;
            }
            let wi = w * row[i];
            rhs[i] += wi * target;
            for j in 0..=i {
                normal[i * p + j] += wi * row[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            normal[j * p + i] = normal[i * p + j];
        }
    }
    let mut phi = linalg::solve_spd(&normal, &rhs, RIDGE)?;
    let last = delta - phi.iter().sum::<f64>();
    phi.push(last);
    Some(phi)
}

/// One feature and its mean absolute attribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedFeature {
    pub index: usize,
    pub score: f64,
}

/// Features ordered by non-increasing score; ties keep the lower index first.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    pub entries: Vec<RankedFeature>,
}

impl FeatureRanking {
    pub fn from_scores(scores: &[f64]) -> Self {
        let mut entries: Vec<RankedFeature> =
            scores.iter().enumerate().map(|(index, &score)| RankedFeature { index, score }).collect();
        entries.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.index).collect()
    }

    /// Score of every feature, by feature index.
    pub fn scores_by_index(&self) -> Vec<f64> {
        let mut scores = vec![0.0; self.entries.len()];
        for e in &self.entries {
            scores[e.index] = e.score;
        }
        scores
    }
}

/// Mean `|phi_i|` over the explanations, ranked.
pub fn aggregate_importance(explanations: &[ShapExplanation]) -> Result<FeatureRanking> {
    let first = explanations.first().ok_or(Error::EmptyInput("no explanations to aggregate"))?;
    let d = first.attributions.len();
    let mut sums = vec![0.0; d];
    for e in explanations {
        if e.attributions.len() != d {
            return Err(Error::DimensionMismatch { what: "explanation width", expected: d, actual: e.attributions.len() });
        }
        for (s, phi) in sums.iter_mut().zip(&e.attributions) {
            *s += phi.abs();
        }
    }
    let n = explanations.len() as f64;
    sums.iter_mut().for_each(|s| *s /= n);
    Ok(FeatureRanking::from_scores(&sums))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::{Activation, Dense};

    fn zero_model(d: usize) -> Autoencoder {
        Autoencoder::from_layers(vec![Dense::zeros(d, 2, Activation::Relu), Dense::zeros(2, d, Activation::Linear)]).unwrap()
    }

    #[test]
    fn kernel_weights() {
        assert!((shapley_kernel_weight(4, 1).unwrap() - 0.25).abs() < 1e-15);
        assert!((shapley_kernel_weight(4, 2).unwrap() - 0.125).abs() < 1e-15);
        for m in 2..30 {
            for s in 1..m {
                assert_eq!(shapley_kernel_weight(m, s).unwrap(), shapley_kernel_weight(m, m - s).unwrap());
            }
        }
        assert!(shapley_kernel_weight(4, 0).is_err());
        assert!(shapley_kernel_weight(4, 4).is_err());
    }

    #[test]
    fn binomials_are_exact() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(30, 15), 155_117_520.0);
        assert_eq!(binomial(10, 0), 1.0);
        assert_eq!(binomial(3, 5), 0.0);
    }

    #[test]
    fn complete_mode_enumerates_all_masks() {
        let s = sample_coalitions(4, 100, 0).unwrap();
        assert!(s.complete);
        assert_eq!(s.len(), 14);
        let mut masks = s.coalitions.clone();
        masks.sort();
        masks.dedup();
        assert_eq!(masks.len(), 14);
        assert!(s.coalitions.iter().all(|c| c.size() > 0 && c.size() < 4));
    }

    #[test]
    fn sampled_mode_fills_budget_reproducibly() {
        let a = sample_coalitions(30, 2048, 17).unwrap();
        let b = sample_coalitions(30, 2048, 17).unwrap();
        assert!(!a.complete);
        assert_eq!(a.len(), 2048);
        assert_eq!(a, b);
        assert_ne!(a, sample_coalitions(30, 2048, 18).unwrap());
        assert!(a.coalitions.iter().all(|c| c.size() > 0 && c.size() < 30));
        let mut masks = a.coalitions.clone();
        masks.sort();
        masks.dedup();
        assert_eq!(masks.len(), 2048);
        // Total weight matches the total kernel mass over sizes 1..M-1.
        let mass: f64 = (1..30).map(|s| 29.0 / (s * (30 - s)) as f64).sum();
        let total: f64 = a.weights.iter().sum();
        assert!((total - mass).abs() < 1e-9 * mass);
        assert!(sample_coalitions(5, 1, 0).is_err());
    }

    #[test]
    fn zero_model_attributions_are_additive() {
        let m = zero_model(3);
        let bg = BackgroundSet::new(vec![1.0, 2.0, 3.0, -1.0, 0.0, 2.0], 3).unwrap();
        let x = [0.5, 0.5, 4.0];
        let e = exact_shapley(&m, &x, &bg).unwrap();
        // error = mean(z^2) is additive, so each feature gets its own share
        let bg_sq = [(1.0 + 1.0) / 2.0, (4.0 + 0.0) / 2.0, (9.0 + 4.0) / 2.0];
        for i in 0..3 {
            assert!((e.attributions[i] - (x[i] * x[i] - bg_sq[i]) / 3.0).abs() < 1e-12);
        }
        let expected = ((1.0 + 4.0 + 9.0) / 3.0 + (1.0 + 0.0 + 4.0) / 3.0) / 2.0;
        assert!((e.base_value - expected).abs() < 1e-12);
    }

    #[test]
    fn single_feature_game() {
        let m = zero_model(1);
        let bg = BackgroundSet::new(vec![2.0, -1.0], 1).unwrap();
        let x = [3.0];
        let e = exact_shapley(&m, &x, &bg).unwrap();
        let v1 = marginal_value(&m, &x, &Coalition::full(1), &bg).unwrap();
        let v0 = marginal_value(&m, &x, &Coalition::empty(1), &bg).unwrap();
        assert_eq!(e.attributions, vec![v1 - v0]);
        let k = kernel_shap_explain(&m, &x, &bg, 16, 0).unwrap();
        assert_eq!(k.attributions, vec![v1 - v0]);
    }

    #[test]
    fn marginal_value_special_coalitions() {
        let mut enc = Dense::zeros(2, 2, Activation::Relu);
        enc.weights = vec![0.5, 0.1, -0.2, 0.7];
        let mut dec = Dense::zeros(2, 2, Activation::Linear);
        dec.weights = vec![1.0, 0.3, 0.2, 1.1];
        let m = Autoencoder::from_layers(vec![enc, dec]).unwrap();
        let x = [1.5, -0.5];
        let bg = BackgroundSet::new(vec![0.2, 0.4, -1.0, 2.0, 0.0, 0.0], 2).unwrap();
        let fx = crate::neural::mse(&m.forward(&x).unwrap(), &x).unwrap();
        assert_eq!(marginal_value(&m, &x, &Coalition::full(2), &bg).unwrap(), fx);

        let empty = marginal_value(&m, &x, &Coalition::empty(2), &bg).unwrap();
        let direct: f64 = bg.rows().chunks(2).map(|b| crate::neural::mse(&m.forward(b).unwrap(), b).unwrap()).sum::<f64>() / 3.0;
        assert!((empty - direct).abs() < 1e-15);

        let one = BackgroundSet::new(vec![0.2, 0.4], 2).unwrap();
        let v = marginal_value(&m, &x, &Coalition::from_indices(2, &[1]), &one).unwrap();
        let hybrid = [0.2, -0.5];
        assert!((v - crate::neural::mse(&m.forward(&hybrid).unwrap(), &hybrid).unwrap()).abs() < 1e-15);

        assert!(marginal_value(&m, &x, &Coalition::full(3), &bg).is_err());
        assert!(BackgroundSet::new(vec![], 2).is_err());
    }

    #[test]
    fn exact_rejects_above_cap() {
        let m = zero_model(16);
        let bg = BackgroundSet::new(vec![0.0; 16], 16).unwrap();
        assert!(matches!(exact_shapley(&m, &[0.0; 16], &bg), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn aggregate_uses_absolute_values() {
        let e = |phi: Vec<f64>| ShapExplanation { base_value: 0.0, model_output: phi.iter().sum(), attributions: phi, instance_index: None };
        let r = aggregate_importance(&[e(vec![0.1, -0.5, 0.3])]).unwrap();
        assert_eq!(r.indices(), vec![1, 2, 0]);
        let same = aggregate_importance(&[e(vec![0.2, 0.4]), e(vec![0.2, 0.4])]).unwrap();
        let flipped = aggregate_importance(&[e(vec![0.2, 0.4]), e(vec![-0.2, -0.4])]).unwrap();
        assert_eq!(same, flipped);
        let tie = aggregate_importance(&[e(vec![0.3, 0.3, 0.1])]).unwrap();
        assert_eq!(tie.indices(), vec![0, 1, 2]);
        assert!(aggregate_importance(&[]).is_err());
        assert!(aggregate_importance(&[e(vec![1.0]), e(vec![1.0, 2.0])]).is_err());
    }
}
