//! Flow datasets: sanitation, train/validation split, standard scaling and a
//! labelled synthetic generator with known anomalous columns.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seed;

/// Row-major feature matrix with named columns and optional binary labels
/// (0 = benign, 1 = attack).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    column_names: Vec<String>,
    labels: Option<Vec<u8>>,
}

impl Dataset {
    pub fn new(
        values: Vec<f64>,
        column_names: Vec<String>,
        labels: Option<Vec<u8>>,
    ) -> Result<Self> {
        let n_cols = column_names.len();
        if n_cols == 0 {
            return Err(Error::EmptyInput("dataset has no feature columns"));
        }
        if values.len() % n_cols != 0 {
            return Err(Error::DimensionMismatch {
                what: "row-major values vs column count",
                expected: (values.len() / n_cols + 1) * n_cols,
                actual: values.len(),
            });
        }
        let n_rows = values.len() / n_cols;
        let mut seen = BTreeSet::new();
        for name in &column_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidParameter(format!("duplicate column name {name:?}")));
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != n_rows {
                return Err(Error::DimensionMismatch {
                    what: "labels vs rows",
                    expected: n_rows,
                    actual: labels.len(),
                });
            }
            if let Some(bad) = labels.iter().find(|&&l| l > 1) {
                return Err(Error::InvalidParameter(format!("label {bad} is not 0 or 1")));
            }
        }
        Ok(Self { values, n_rows, n_cols, column_names, labels })
    }

    /// Builds a dataset from rows, naming columns `f00`, `f01`, ...
    pub fn from_rows(rows: &[Vec<f64>], labels: Option<Vec<u8>>) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch { what: "row length", expected: n_cols, actual: row.len() });
            }
            values.extend_from_slice(row);
        }
        Self::new(values, default_names(n_cols), labels)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    /// New dataset made of the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        let mut values = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        let labels = self.labels.as_ref().map(|l| indices.iter().map(|&i| l[i]).collect());
        Dataset {
            values,
            n_rows: indices.len(),
            n_cols: self.n_cols,
            column_names: self.column_names.clone(),
            labels,
        }
    }

    /// Rows whose label equals `label`. Unlabelled datasets are returned as is
    /// when asking for benign rows, and empty otherwise.
    pub fn rows_with_label(&self, label: u8) -> Dataset {
        match &self.labels {
            Some(labels) => {
                let idx: Vec<usize> = (0..self.n_rows).filter(|&i| labels[i] == label).collect();
                self.select_rows(&idx)
            }
            None if label == 0 => self.clone(),
            None => self.select_rows(&[]),
        }
    }

    pub fn without_labels(mut self) -> Dataset {
        self.labels = None;
        self
    }

    pub(crate) fn from_parts_unchecked(
        values: Vec<f64>,
        n_cols: usize,
        column_names: Vec<String>,
        labels: Option<Vec<u8>>,
    ) -> Dataset {
        let n_rows = values.len().checked_div(n_cols).unwrap_or(0);
        Dataset { values, n_rows, n_cols, column_names, labels }
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|j| format!("f{j:02}")).collect()
}

/// Removes every row holding a NaN or an infinity. Returns the cleaned
/// dataset and the number of dropped rows.
pub fn sanitize(d: &Dataset) -> Result<(Dataset, usize)> {
    if d.is_empty() {
        return Err(Error::EmptyInput("dataset has no rows"));
    }
    let keep: Vec<usize> = (0..d.n_rows()).filter(|&i| d.row(i).iter().all(|v| v.is_finite())).collect();
    if keep.is_empty() {
        return Err(Error::AllRowsDropped { rows: d.n_rows() });
    }
    let dropped = d.n_rows() - keep.len();
    if dropped == 0 {
        return Ok((d.clone(), 0));
    }
    Ok((d.select_rows(&keep), dropped))
}

/// Seeded shuffle then split; the training part has `round(n * fraction)` rows.
pub fn split_train_val(d: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n = d.n_rows();
    let n_train = libm::round(n as f64 * train_fraction) as usize;
    if n < 2 || n_train == 0 || n_train >= n {
        return Err(Error::EmptyPartition { rows: n, train_fraction });
    }
    let idx = seed::permutation(n, seed);
    Ok((d.select_rows(&idx[..n_train]), d.select_rows(&idx[n_train..])))
}

/// Per-column standardization parameters (population standard deviation).
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub columns: Vec<String>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// Fits means and population stds. A constant column gets std 1 so that
/// it maps to zero instead of being dropped.
pub fn fit_scaler(d: &Dataset) -> Result<Scaler> {
    if d.is_empty() {
        return Err(Error::EmptyInput("cannot fit a scaler on zero rows"));
    }
    let n = d.n_rows() as f64;
    let mut means = vec![0.0; d.n_cols()];
    for row in d.rows() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);

    let mut sq = vec![0.0; d.n_cols()];
    let mut constant = vec![true; d.n_cols()];
    let first = d.row(0);
    for row in d.rows() {
        for j in 0..d.n_cols() {
            let dv = row[j] - means[j];
            sq[j] += dv * dv;
            constant[j] &= row[j] == first[j];
        }
    }
    let stds = sq
        .iter()
        .zip(&constant)
        .map(|(s, &c)| if c { 1.0 } else { libm::sqrt(s / n) })
        .map(|s| if s > 0.0 { s } else { 1.0 })
        .collect();
    Ok(Scaler { columns: d.column_names().to_vec(), means, stds })
}

impl Scaler {
    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, d: &Dataset) -> Result<Dataset> {
        self.check_dim(d)?;
        let mut values = d.values().to_vec();
        for row in values.chunks_exact_mut(self.dim()) {
            for ((v, m), s) in row.iter_mut().zip(&self.means).zip(&self.stds) {
                *v = (*v - m) / s;
            }
        }
        Ok(Dataset::from_parts_unchecked(
            values,
            d.n_cols(),
            d.column_names().to_vec(),
            d.labels().map(<[u8]>::to_vec),
        ))
    }

    pub fn inverse_transform(&self, d: &Dataset) -> Result<Dataset> {
        self.check_dim(d)?;
        let mut values = d.values().to_vec();
        for row in values.chunks_exact_mut(self.dim()) {
            for ((v, m), s) in row.iter_mut().zip(&self.means).zip(&self.stds) {
                *v = *v * s + m;
            }
        }
        Ok(Dataset::from_parts_unchecked(
            values,
            d.n_cols(),
            d.column_names().to_vec(),
            d.labels().map(<[u8]>::to_vec),
        ))
    }

    /// Restricts the scaler to a subset of its columns.
    pub fn project(&self, indices: &[usize]) -> Result<Scaler> {
        for &i in indices {
            if i >= self.dim() {
                return Err(Error::IndexOutOfRange { index: i, len: self.dim() });
            }
        }
        Ok(Scaler {
            columns: indices.iter().map(|&i| self.columns[i].clone()).collect(),
            means: indices.iter().map(|&i| self.means[i]).collect(),
            stds: indices.iter().map(|&i| self.stds[i]).collect(),
        })
    }

    fn check_dim(&self, d: &Dataset) -> Result<()> {
        if d.n_cols() != self.dim() {
            return Err(Error::DimensionMismatch { what: "scaler columns", expected: self.dim(), actual: d.n_cols() });
        }
        Ok(())
    }
}

/// Recipe for a labelled synthetic flow dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_features: usize,
    pub n_benign: usize,
    pub n_attack: usize,
    pub anomalous_features: Vec<usize>,
    /// Shift applied to anomalous columns of attack rows, in benign-std units.
    pub shift_magnitude: f64,
    pub seed: u64,
}

/// Rank of the shared latent factor that correlates benign columns.
const SYNTH_LATENT_RANK: usize = 2;

/// Benign rows are `mean_j + std_j * (a_j . z + sqrt(1 - |a_j|^2) e_j)` with a
/// shared low-rank latent `z`, so every column is Gaussian with exactly
/// `std_j` spread. Attack rows add `shift * std_j` on the anomalous columns.
/// Benign rows come first, then attack rows.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<Dataset> {
    if spec.n_features == 0 {
        return Err(Error::InvalidParameter("n_features must be positive".into()));
    }
    if !(spec.shift_magnitude > 0.0 && spec.shift_magnitude.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "shift magnitude must be positive and finite, got {}",
            spec.shift_magnitude
        )));
    }
    if let Some(&bad) = spec.anomalous_features.iter().find(|&&j| j >= spec.n_features) {
        return Err(Error::IndexOutOfRange { index: bad, len: spec.n_features });
    }
    if spec.n_benign + spec.n_attack == 0 {
        return Err(Error::EmptyInput("synthetic spec requests zero rows"));
    }

    let d = spec.n_features;
    let mut rng = seed::rng(spec.seed);
    let means: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
    let stds: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..2.0)).collect();
    let loadings: Vec<[f64; SYNTH_LATENT_RANK]> = (0..d)
        .map(|_| core::array::from_fn(|_| rng.random_range(-0.5..0.5)))
        .collect();
    let mut shift = vec![0.0; d];
    for &j in &spec.anomalous_features {
        shift[j] = spec.shift_magnitude * stds[j];
    }

    let n = spec.n_benign + spec.n_attack;
    let mut values = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let attack = i >= spec.n_benign;
        let z: [f64; SYNTH_LATENT_RANK] = core::array::from_fn(|_| rng.sample(StandardNormal));
        for j in 0..d {
            let a = &loadings[j];
            let shared: f64 = a.iter().zip(&z).map(|(a, z)| a * z).sum();
            let own = libm::sqrt(1.0 - a.iter().map(|a| a * a).sum::<f64>());
            let e: f64 = rng.sample(StandardNormal);
            let mut v = means[j] + stds[j] * (shared + own * e);
            if attack {
                v += shift[j];
            }
            values.push(v);
        }
        labels.push(attack as u8);
    }
    Dataset::new(values, default_names(d), Some(labels))
}
