//! Dense autoencoder with ReLU hidden layers and a linear output layer,
//! trained with mini-batch Adam on mean-squared reconstruction error plus an
//! L2 penalty on the weights.
//!
//! The per-sample reconstruction error is the mean (not the sum) of squared
//! feature residuals, so scores do not grow with the input width.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::seed::{self, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Linear,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Linear => "linear",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "relu" => Some(Activation::Relu),
            "linear" => Some(Activation::Linear),
            _ => None,
        }
    }

    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the activation output. ReLU uses 0 at 0.
    #[inline]
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Linear => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderConfig {
    /// Input width, hidden widths, output width (equal to the input width).
    pub layer_sizes: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub learning_rate: f64,
    pub l2_coefficient: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

/// Hidden widths of the reference network.
pub const REFERENCE_HIDDEN: [usize; 5] = [70, 30, 10, 30, 70];

impl AutoencoderConfig {
    /// `[d, 70, 30, 10, 30, 70, d]`, lr 1e-3, L2 1e-3, 100 epochs, batch 8192.
    pub fn reference(input_dim: usize) -> Self {
        Self::with_hidden(input_dim, &REFERENCE_HIDDEN)
    }

    pub fn with_hidden(input_dim: usize, hidden: &[usize]) -> Self {
        let mut layer_sizes = Vec::with_capacity(hidden.len() + 2);
        layer_sizes.push(input_dim);
        layer_sizes.extend_from_slice(hidden);
        layer_sizes.push(input_dim);
        Self {
            layer_sizes,
            hidden_activation: Activation::Relu,
            output_activation: Activation::Linear,
            learning_rate: 1e-3,
            l2_coefficient: 1e-3,
            epochs: 100,
            batch_size: 8192,
            seed: 0,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes.first().copied().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 2 {
            return Err(Error::InvalidParameter("an autoencoder needs at least input and output layers".into()));
        }
        if self.layer_sizes.contains(&0) {
            return Err(Error::InvalidParameter(format!("layer size 0 in {:?}", self.layer_sizes)));
        }
        if self.layer_sizes.first() != self.layer_sizes.last() {
            return Err(Error::InvalidParameter(format!(
                "first and last layer sizes must match, got {:?}",
                self.layer_sizes
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if !(self.l2_coefficient >= 0.0 && self.l2_coefficient.is_finite()) {
            return Err(Error::InvalidParameter(format!("l2 coefficient must be >= 0, got {}", self.l2_coefficient)));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidParameter("epochs and batch size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Fully connected layer; `weights` is row-major `[n_out x n_in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub n_in: usize,
    pub n_out: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

impl Dense {
    pub fn zeros(n_in: usize, n_out: usize, activation: Activation) -> Self {
        Self { n_in, n_out, weights: vec![0.0; n_in * n_out], biases: vec![0.0; n_out], activation }
    }

    /// Applies the layer to `n` row-major input rows.
    fn forward_rows(&self, input: &[f64], out: &mut Vec<f64>) {
        let n = input.len() / self.n_in;
        out.clear();
        out.resize(n * self.n_out, 0.0);
        for (x, y) in input.chunks_exact(self.n_in).zip(out.chunks_exact_mut(self.n_out)) {
            for ((w, b), y) in self.weights.chunks_exact(self.n_in).zip(&self.biases).zip(y.iter_mut()) {
                let z = b + dot(w, x);
                *y = self.activation.apply(z);
            }
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four accumulators let the compiler vectorize without reassociating.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Encoder followed by decoder, stored as one stack of dense layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Autoencoder {
    layers: Vec<Dense>,
    trained: bool,
}

/// Fan-in scaled uniform init (`U(-sqrt(6/fan_in), sqrt(6/fan_in))`), zero biases.
pub fn init_model(cfg: &AutoencoderConfig) -> Result<Autoencoder> {
    cfg.validate()?;
    let mut rng = seed::rng(seed::derive(cfg.seed, Stage::Init));
    let last = cfg.layer_sizes.len() - 2;
    let layers = cfg
        .layer_sizes
        .windows(2)
        .enumerate()
        .map(|(l, w)| {
            let (n_in, n_out) = (w[0], w[1]);
            let activation = if l == last { cfg.output_activation } else { cfg.hidden_activation };
            let limit = libm::sqrt(6.0 / n_in as f64);
            let weights = (0..n_in * n_out).map(|_| rng.random_range(-limit..limit)).collect();
            Dense { n_in, n_out, weights, biases: vec![0.0; n_out], activation }
        })
        .collect();
    Ok(Autoencoder { layers, trained: false })
}

impl Autoencoder {
    /// Wraps explicit layers (e.g. loaded from disk). The model counts as trained.
    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        let first = layers.first().ok_or(Error::EmptyInput("autoencoder without layers"))?;
        for (l, layer) in layers.iter().enumerate() {
            if layer.n_in == 0 || layer.n_out == 0 {
                return Err(Error::InvalidParameter(format!("layer {l} has a zero dimension")));
            }
            if layer.weights.len() != layer.n_in * layer.n_out {
                return Err(Error::DimensionMismatch {
                    what: "layer weights",
                    expected: layer.n_in * layer.n_out,
                    actual: layer.weights.len(),
                });
            }
            if layer.biases.len() != layer.n_out {
                return Err(Error::DimensionMismatch { what: "layer biases", expected: layer.n_out, actual: layer.biases.len() });
            }
            if l > 0 && layers[l - 1].n_out != layer.n_in {
                return Err(Error::DimensionMismatch { what: "layer chaining", expected: layers[l - 1].n_out, actual: layer.n_in });
            }
        }
        let last = layers.last().unwrap();
        if first.n_in != last.n_out {
            return Err(Error::DimensionMismatch { what: "autoencoder output width", expected: first.n_in, actual: last.n_out });
        }
        Ok(Self { layers, trained: true })
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.layers[0].n_in];
        sizes.extend(self.layers.iter().map(|l| l.n_out));
        sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn mark_trained(&mut self) {
        self.trained = true;
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_width(x.len())?;
        Ok(self.forward_rows(x))
    }

    /// Reconstructs every row of a row-major block.
    pub fn forward_rows(&self, rows: &[f64]) -> Vec<f64> {
        let mut cur = rows.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers {
            layer.forward_rows(&cur, &mut next);
            core::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    /// Per-row reconstruction MSE of a row-major block, without shape checks.
    pub(crate) fn row_errors(&self, rows: &[f64]) -> Vec<f64> {
        let d = self.input_dim();
        let recon = self.forward_rows(rows);
        rows.chunks_exact(d)
            .zip(recon.chunks_exact(d))
            .map(|(x, y)| mse_unchecked(y, x))
            .collect()
    }

    /// Anomaly score of every row: `mse(forward(row), row)`.
    pub fn reconstruction_errors(&self, d: &Dataset) -> Result<Vec<f64>> {
        if !self.trained {
            return Err(Error::UntrainedModel);
        }
        self.check_width(d.n_cols())?;
        Ok(self.row_errors(d.values()))
    }

    fn check_width(&self, width: usize) -> Result<()> {
        if width != self.input_dim() {
            return Err(Error::DimensionMismatch { what: "model input", expected: self.input_dim(), actual: width });
        }
        Ok(())
    }

    /// Mean reconstruction MSE of a row-major batch plus `l2 * sum(W^2)`.
    pub fn loss(&self, batch: &[f64], l2: f64) -> Result<f64> {
        let d = self.input_dim();
        if batch.is_empty() || batch.len() % d != 0 {
            return Err(Error::DimensionMismatch { what: "batch width", expected: d, actual: batch.len() % d.max(1) });
        }
        let errors = self.row_errors(batch);
        let data = errors.iter().sum::<f64>() / errors.len() as f64;
        Ok(data + l2 * self.weight_norm_sq())
    }

    fn weight_norm_sq(&self) -> f64 {
        self.layers.iter().flat_map(|l| &l.weights).map(|w| w * w).sum()
    }

    /// Exact gradients of [`Autoencoder::loss`] by reverse-mode differentiation.
    /// Returns the loss alongside.
    pub fn gradients(&self, batch: &[f64], l2: f64) -> Result<(f64, Gradients)> {
        let d = self.input_dim();
        if batch.is_empty() || batch.len() % d != 0 {
            return Err(Error::DimensionMismatch { what: "batch width", expected: d, actual: batch.len() % d.max(1) });
        }
        let n = batch.len() / d;

        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len() + 1);
        acts.push(batch.to_vec());
        for layer in &self.layers {
            let mut out = Vec::new();
            layer.forward_rows(acts.last().unwrap(), &mut out);
            acts.push(out);
        }

        let output = acts.last().unwrap();
        let scale = 1.0 / (n * d) as f64;
        let mut sq = 0.0;
        let mut delta: Vec<f64> = output
            .iter()
            .zip(batch)
            .map(|(y, x)| {
                let r = y - x;
                sq += r * r;
                2.0 * r * scale
            })
            .collect();
        let loss = sq * scale + l2 * self.weight_norm_sq();

        let mut grads: Vec<LayerGradient> = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let out = &acts[l + 1];
            for (dz, a) in delta.iter_mut().zip(out) {
                *dz *= layer.activation.derivative_from_output(*a);
            }
            let input = &acts[l];
            let mut gw: Vec<f64> = layer.weights.iter().map(|w| 2.0 * l2 * w).collect();
            let mut gb = vec![0.0; layer.n_out];
            for (dz, x) in delta.chunks_exact(layer.n_out).zip(input.chunks_exact(layer.n_in)) {
                for (o, &g) in dz.iter().enumerate() {
                    if g == 0.0 {
                        continue;
                    }
                    gb[o] += g;
                    for (gw, xi) in gw[o * layer.n_in..(o + 1) * layer.n_in].iter_mut().zip(x) {
                        *gw += g * xi;
                    }
                }
            }
            if l > 0 {
                let mut prev = vec![0.0; n * layer.n_in];
                for (dz, dp) in delta.chunks_exact(layer.n_out).zip(prev.chunks_exact_mut(layer.n_in)) {
                    for (o, &g) in dz.iter().enumerate() {
                        if g == 0.0 {
                            continue;
                        }
                        for (p, w) in dp.iter_mut().zip(&layer.weights[o * layer.n_in..(o + 1) * layer.n_in]) {
                            *p += g * w;
                        }
                    }
                }
                delta = prev;
            }
            grads.push(LayerGradient { weights: gw, biases: gb });
        }
        grads.reverse();
        Ok((loss, Gradients { layers: grads }))
    }

    /// Parameter tensors in a fixed order: weights then biases, layer by layer.
    pub fn parameters_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.biases.as_mut_slice()])
            .collect()
    }

    pub fn parameters(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(|l| [l.weights.as_slice(), l.biases.as_slice()]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradient>,
}

impl Gradients {
    /// Same order as [`Autoencoder::parameters`].
    pub fn tensors(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(|l| [l.weights.as_slice(), l.biases.as_slice()]).collect()
    }
}

fn mse_unchecked(recon: &[f64], x: &[f64]) -> f64 {
    recon.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / x.len() as f64
}

/// Mean over features of the squared residual.
pub fn mse(recon: &[f64], x: &[f64]) -> Result<f64> {
    if recon.len() != x.len() || x.is_empty() {
        return Err(Error::DimensionMismatch { what: "mse operands", expected: x.len(), actual: recon.len() });
    }
    Ok(mse_unchecked(recon, x))
}

/// Mean over features of the absolute residual.
pub fn mae(recon: &[f64], x: &[f64]) -> Result<f64> {
    if recon.len() != x.len() || x.is_empty() {
        return Err(Error::DimensionMismatch { what: "mae operands", expected: x.len(), actual: recon.len() });
    }
    Ok(recon.iter().zip(x).map(|(a, b)| (a - b).abs()).sum::<f64>() / x.len() as f64)
}

/// Adam moments for a list of parameter tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(shapes: &[usize]) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            first: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            second: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn for_model(model: &Autoencoder) -> Self {
        let shapes: Vec<usize> = model.parameters().iter().map(|t| t.len()).collect();
        Self::new(&shapes)
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected Adam step: `p -= lr * m_hat / (sqrt(v_hat) + eps)`.
    pub fn update(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]], lr: f64) -> Result<()> {
        if params.len() != self.first.len() || grads.len() != self.first.len() {
            return Err(Error::DimensionMismatch { what: "adam tensor count", expected: self.first.len(), actual: grads.len() });
        }
        for k in 0..params.len() {
            let n = self.first[k].len();
            if params[k].len() != n || grads[k].len() != n {
                return Err(Error::DimensionMismatch { what: "adam tensor shape", expected: n, actual: grads[k].len() });
            }
        }
        self.step += 1;
        let t = self.step as f64;
        let c1 = 1.0 - libm::pow(self.beta1, t);
        let c2 = 1.0 - libm::pow(self.beta2, t);
        let (b1, b2, eps) = (self.beta1, self.beta2, self.epsilon);
        for (k, p) in params.iter_mut().enumerate() {
            let (m, v, g) = (&mut self.first[k], &mut self.second[k], grads[k]);
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= lr * m_hat / (libm::sqrt(v_hat) + eps);
            }
        }
        Ok(())
    }
}

/// Loss curves of one training run. Losses are mean reconstruction MSE over
/// the whole split, measured after each epoch (the L2 term is excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub initial_train_loss: f64,
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub epochs: usize,
}

fn mean_error(model: &Autoencoder, d: &Dataset) -> f64 {
    let e = model.row_errors(d.values());
    e.iter().sum::<f64>() / e.len() as f64
}

/// Mini-batch Adam for `cfg.epochs` epochs with a seeded per-epoch shuffle.
/// No early stopping; the validation loss is only monitored.
pub fn fit(model: &mut Autoencoder, train: &Dataset, val: &Dataset, cfg: &AutoencoderConfig) -> Result<TrainReport> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyInput("training set has no rows"));
    }
    if val.is_empty() {
        return Err(Error::EmptyInput("validation set has no rows"));
    }
    model.check_width(train.n_cols())?;
    model.check_width(val.n_cols())?;

    let d = model.input_dim();
    let mut adam = AdamState::for_model(model);
    let mut rng = seed::rng(seed::derive(cfg.seed, Stage::Shuffle));
    let mut order: Vec<usize> = (0..train.n_rows()).collect();
    let mut batch = Vec::with_capacity(cfg.batch_size.min(train.n_rows()) * d);

    let initial_train_loss = mean_error(model, train);
    let mut report = TrainReport { initial_train_loss, train_loss: Vec::new(), val_loss: Vec::new(), epochs: 0 };
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            batch.clear();
            for &i in chunk {
                batch.extend_from_slice(train.row(i));
            }
            let (loss, grads) = model.gradients(&batch, cfg.l2_coefficient)?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            let tensors = grads.tensors();
            let mut params = model.parameters_mut();
            adam.update(&mut params, &tensors, cfg.learning_rate)?;
        }
        let train_loss = mean_error(model, train);
        let val_loss = mean_error(model, val);
        if !train_loss.is_finite() || !val_loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        report.train_loss.push(train_loss);
        report.val_loss.push(val_loss);
        report.epochs = epoch + 1;
    }
    model.trained = true;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tiny(hidden: &[usize], d: usize, seed: u64) -> Autoencoder {
        let mut cfg = AutoencoderConfig::with_hidden(d, hidden);
        cfg.seed = seed;
        init_model(&cfg).unwrap()
    }

    #[test]
    fn reference_architecture() {
        let m = init_model(&AutoencoderConfig::reference(78)).unwrap();
        assert_eq!(m.layer_sizes(), vec![78, 70, 30, 10, 30, 70, 78]);
        let acts: Vec<_> = m.layers().iter().map(|l| l.activation).collect();
        assert_eq!(acts[..5], [Activation::Relu; 5]);
        assert_eq!(acts[5], Activation::Linear);
        assert!(m.layers().iter().all(|l| l.biases.iter().all(|&b| b == 0.0)));
    }

    #[test]
    fn init_is_deterministic_with_expected_shapes() {
        let a = tiny(&[2], 4, 9);
        assert_eq!(a, tiny(&[2], 4, 9));
        assert_ne!(a, tiny(&[2], 4, 10));
        assert_eq!((a.layers()[0].n_out, a.layers()[0].n_in), (2, 4));
        assert_eq!((a.layers()[1].n_out, a.layers()[1].n_in), (4, 2));
        assert_eq!(a.layers()[0].weights.len(), 8);
    }

    #[test]
    fn config_validation() {
        let mut cfg = AutoencoderConfig::with_hidden(4, &[0]);
        assert!(init_model(&cfg).is_err());
        cfg = AutoencoderConfig::with_hidden(4, &[2]);
        cfg.layer_sizes[2] = 3;
        assert!(cfg.validate().is_err());
        cfg = AutoencoderConfig::with_hidden(4, &[2]);
        cfg.learning_rate = 0.0;
        assert!(cfg.validate().is_err());
        cfg.learning_rate = 1e-3;
        cfg.epochs = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn zero_model_outputs_zero() {
        let m = Autoencoder::from_layers(vec![
            Dense::zeros(3, 2, Activation::Relu),
            Dense::zeros(2, 3, Activation::Linear),
        ])
        .unwrap();
        assert_eq!(m.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.0; 3]);
        assert!(m.forward(&[1.0]).is_err());
    }

    #[test]
    fn identity_like_weights_reproduce_nonnegative_input() {
        let mut enc = Dense::zeros(2, 2, Activation::Relu);
        enc.weights = vec![1.0, 0.0, 0.0, 1.0];
        let mut dec = Dense::zeros(2, 2, Activation::Linear);
        dec.weights = vec![1.0, 0.0, 0.0, 1.0];
        let m = Autoencoder::from_layers(vec![enc, dec]).unwrap();
        assert_eq!(m.forward(&[0.5, 3.0]).unwrap(), vec![0.5, 3.0]);
        assert_eq!(m.forward(&[-1.0, 3.0]).unwrap(), vec![0.0, 3.0]);
    }

    #[test]
    fn batched_forward_matches_single_rows() {
        let m = tiny(&[5, 3, 5], 6, 1);
        let rows: Vec<f64> = (0..24).map(|i| (i as f64 * 0.37).sin()).collect();
        let batched = m.forward_rows(&rows);
        for (x, y) in rows.chunks(6).zip(batched.chunks(6)) {
            assert_eq!(m.forward(x).unwrap(), y);
        }
    }

    #[test]
    fn mse_and_mae_values() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[1.0, 1.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert!((mse(&[1.0, 2.0, 4.0], &[1.0, 2.0, 3.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(mae(&[3.0, 4.0], &[3.0, 4.0]).unwrap(), 0.0);
        assert_eq!(mae(&[1.0, -1.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(mae(&[5.0], &[2.0]).unwrap(), 3.0);
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(mae(&[1.0], &[]).is_err());
    }

    #[test]
    fn weight_decay_part_is_linear_in_l2() {
        let m = tiny(&[3], 4, 2);
        let batch: Vec<f64> = (0..20).map(|i| (i as f64).cos()).collect();
        let g0 = m.gradients(&batch, 0.0).unwrap().1;
        let g1 = m.gradients(&batch, 0.01).unwrap().1;
        let g2 = m.gradients(&batch, 0.02).unwrap().1;
        for ((a, b), c) in g0.tensors().iter().zip(g1.tensors()).zip(g2.tensors()) {
            for ((a, b), c) in a.iter().zip(b).zip(c) {
                assert!(((c - a) - 2.0 * (b - a)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn perfect_reconstruction_has_zero_gradient() {
        let mut enc = Dense::zeros(2, 2, Activation::Relu);
        enc.weights = vec![1.0, 0.0, 0.0, 1.0];
        let mut dec = Dense::zeros(2, 2, Activation::Linear);
        dec.weights = vec![1.0, 0.0, 0.0, 1.0];
        let m = Autoencoder::from_layers(vec![enc, dec]).unwrap();
        let (loss, g) = m.gradients(&[1.0, 2.0, 0.5, 0.25], 0.0).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.tensors().iter().all(|t| t.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate() {
        let mut adam = AdamState::new(&[3]);
        let mut p = [1.0, 1.0, 1.0];
        let g = [0.5, -3.0, 0.5];
        adam.update(&mut [&mut p[..]], &[&g[..]], 1e-3).unwrap();
        assert!((p[0] - (1.0 - 1e-3)).abs() < 1e-6 * 1e-3 + 1e-12);
        assert!((p[1] - (1.0 + 1e-3)).abs() < 1e-6 * 1e-3 + 1e-12);
        assert_eq!(p[0], p[2]);
    }

    #[test]
    fn adam_zero_gradient_is_a_no_op_and_shapes_are_checked() {
        let mut adam = AdamState::new(&[2]);
        let mut p = [0.3, -0.7];
        for _ in 0..10 {
            adam.update(&mut [&mut p[..]], &[&[0.0, 0.0][..]], 0.1).unwrap();
        }
        assert_eq!(p, [0.3, -0.7]);
        assert!(adam.update(&mut [&mut p[..]], &[&[0.0][..]], 0.1).is_err());
    }

    fn toy_data(n: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = seed::rng(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let z: f64 = rng.random_range(-1.0..1.0);
                (0..d).map(|j| z * (j as f64 + 1.0) / d as f64 + 0.1 * rng.random_range(-1.0..1.0)).collect()
            })
            .collect();
        Dataset::from_rows(&rows, None).unwrap()
    }

    #[test]
    fn fit_reduces_loss_and_is_deterministic() {
        let train = toy_data(100, 8, 1);
        let val = toy_data(30, 8, 2);
        let mut cfg = AutoencoderConfig::with_hidden(8, &[6, 3, 6]);
        cfg.epochs = 50;
        cfg.batch_size = 16;
        cfg.learning_rate = 1e-2;
        cfg.seed = 5;
        let mut a = init_model(&cfg).unwrap();
        assert_eq!(a.reconstruction_errors(&train), Err(Error::UntrainedModel));
        let ra = fit(&mut a, &train, &val, &cfg).unwrap();
        assert!(a.is_trained());
        assert_eq!(ra.train_loss.len(), 50);
        assert_eq!(ra.val_loss.len(), 50);
        assert!(*ra.train_loss.last().unwrap() < ra.initial_train_loss);

        let mut b = init_model(&cfg).unwrap();
        let rb = fit(&mut b, &train, &val, &cfg).unwrap();
        assert_eq!(ra, rb);
        assert_eq!(a, b);
    }

    #[test]
    fn fit_rejects_empty_and_diverging_runs() {
        let train = toy_data(20, 4, 1);
        let mut cfg = AutoencoderConfig::with_hidden(4, &[2]);
        cfg.epochs = 2;
        let mut m = init_model(&cfg).unwrap();
        assert!(fit(&mut m, &train.select_rows(&[]), &train, &cfg).is_err());

        let mut huge = train.values().to_vec();
        huge[0] = 1e300;
        let bad = Dataset::new(huge, train.column_names().to_vec(), None).unwrap();
        cfg.learning_rate = 10.0;
        assert!(matches!(fit(&mut m, &bad, &train, &cfg), Err(Error::NonFiniteLoss { .. })));
    }
}
