//! Feature-selection strategies: every feature, the greedy correlation
//! filter, and the top-k of a Shapley importance ranking.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::explain::FeatureRanking;

/// Pearson correlation matrix, row-major `[d x d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub values: Vec<f64>,
    pub column_names: Vec<String>,
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.column_names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim() + j]
    }
}

/// Pearson coefficients between all column pairs. A constant column has
/// correlation 0 with every other column and 1 with itself.
pub fn correlation_matrix(d: &Dataset) -> Result<CorrelationMatrix> {
    if d.n_rows() < 2 {
        return Err(Error::EmptyInput("correlation needs at least two rows"));
    }
    let n = d.n_rows() as f64;
    let m = d.n_cols();
    let mut means = vec![0.0; m];
    for row in d.rows() {
        for (mu, v) in means.iter_mut().zip(row) {
            *mu += v;
        }
    }
    means.iter_mut().for_each(|mu| *mu /= n);

    let first = d.row(0);
    let mut constant = vec![true; m];
    let mut cross = vec![0.0; m * m];
    let mut centered = vec![0.0; m];
    for row in d.rows() {
        for j in 0..m {
            centered[j] = row[j] - means[j];
            constant[j] &= row[j] == first[j];
        }
        for i in 0..m {
            let ci = centered[i];
            for j in i..m {
                cross[i * m + j] += ci * centered[j];
            }
        }
    }

    let mut values = vec![0.0; m * m];
    for i in 0..m {
        values[i * m + i] = 1.0;
        for j in i + 1..m {
            let r = if constant[i] || constant[j] {
                0.0
            } else {
                let denom = libm::sqrt(cross[i * m + i]) * libm::sqrt(cross[j * m + j]);
                (cross[i * m + j] / denom).clamp(-1.0, 1.0)
            };
            values[i * m + j] = r;
            values[j * m + i] = r;
        }
    }
    Ok(CorrelationMatrix { values, column_names: d.column_names().to_vec() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    All,
    Correlation,
    Shap,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::All => "all",
            Provenance::Correlation => "correlation",
            Provenance::Shap => "shap",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "all" => Some(Provenance::All),
            "correlation" => Some(Provenance::Correlation),
            "shap" => Some(Provenance::Shap),
            _ => None,
        }
    }
}

/// Ordered column selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSet {
    pub indices: Vec<usize>,
    pub provenance: Provenance,
}

impl FeatureSet {
    pub fn all(d: usize) -> Self {
        Self { indices: (0..d).collect(), provenance: Provenance::All }
    }

    pub fn new(indices: Vec<usize>, provenance: Provenance, d: usize) -> Result<Self> {
        let mut seen = vec![false; d];
        for &i in &indices {
            if i >= d {
                return Err(Error::IndexOutOfRange { index: i, len: d });
            }
            if core::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameter(alloc::format!("feature index {i} selected twice")));
            }
        }
        Ok(Self { indices, provenance })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// How a pair's correlation is compared against the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrelationMode {
    /// `corr >= threshold`; strong negative correlation is kept.
    #[default]
    Signed,
    /// `|corr| >= threshold`.
    Absolute,
}

/// Which columns may eliminate later ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanRule {
    /// Only a column that is still kept drops its correlated successors.
    #[default]
    KeptOnly,
    /// Every column drops its correlated successors, kept or not.
    Literal,
}

/// Greedy redundancy filter with the default signed comparison and kept-only scan.
pub fn correlation_filter(c: &CorrelationMatrix, threshold: f64) -> Result<FeatureSet> {
    correlation_filter_with(c, threshold, CorrelationMode::Signed, ScanRule::KeptOnly)
}

/// Scans pairs `(i, j)` with `i < j` in index order and drops `j` when it
/// correlates with `i` at or above `threshold`. Returns the surviving
/// columns in their original order.
pub fn correlation_filter_with(
    c: &CorrelationMatrix,
    threshold: f64,
    mode: CorrelationMode,
    rule: ScanRule,
) -> Result<FeatureSet> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "correlation threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let d = c.dim();
    let mut keep = vec![true; d];
    for i in 0..d {
        if rule == ScanRule::KeptOnly && !keep[i] {
            continue;
        }
        for (j, kept) in keep.iter_mut().enumerate().skip(i + 1) {
            let r = match mode {
                CorrelationMode::Signed => c.get(i, j),
                CorrelationMode::Absolute => c.get(i, j).abs(),
            };
            if r >= threshold {
                *kept = false;
            }
        }
    }
    let indices = (0..d).filter(|&j| keep[j]).collect();
    Ok(FeatureSet { indices, provenance: Provenance::Correlation })
}

/// The `k` highest-ranked features, in ranking order.
pub fn top_k(r: &FeatureRanking, k: usize) -> Result<FeatureSet> {
    if k == 0 || k > r.len() {
        return Err(Error::InvalidParameter(alloc::format!("top-k needs 1 <= k <= {}, got {k}", r.len())));
    }
    Ok(FeatureSet { indices: r.entries[..k].iter().map(|e| e.index).collect(), provenance: Provenance::Shap })
}

/// Column subset of `d`, keeping row order and labels.
pub fn project(d: &Dataset, fs: &FeatureSet) -> Result<Dataset> {
    if fs.is_empty() {
        return Err(Error::EmptyInput("feature set selects no columns"));
    }
    if let Some(&bad) = fs.indices.iter().find(|&&i| i >= d.n_cols()) {
        return Err(Error::IndexOutOfRange { index: bad, len: d.n_cols() });
    }
    let mut values = Vec::with_capacity(d.n_rows() * fs.len());
    for row in d.rows() {
        values.extend(fs.indices.iter().map(|&i| row[i]));
    }
    let names = fs.indices.iter().map(|&i| d.column_names()[i].clone()).collect();
    Dataset::new(values, names, d.labels().map(<[u8]>::to_vec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn cols(columns: &[&[f64]]) -> Dataset {
        let n = columns[0].len();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        Dataset::from_rows(&rows, None).unwrap()
    }

    #[test]
    fn pearson_basics() {
        let x = [1.0, 2.0, 4.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        let z: Vec<f64> = x.iter().map(|v| -v).collect();
        let c = correlation_matrix(&cols(&[&x, &y, &z, &[5.0; 4]])).unwrap();
        assert_eq!(c.get(0, 0), 1.0);
        assert!((c.get(0, 1) - 1.0).abs() < 1e-12);
        assert!((c.get(0, 2) + 1.0).abs() < 1e-12);
        assert_eq!(c.get(3, 3), 1.0);
        assert_eq!(c.get(0, 3), 0.0);
        assert_eq!(c.get(1, 0), c.get(0, 1));
        assert!(correlation_matrix(&cols(&[&[1.0]])).is_err());
    }

    #[test]
    fn filter_drops_later_duplicate() {
        let a = [1.0, 3.0, 2.0, 5.0];
        let b = [0.3, -1.0, 2.0, 0.0];
        let c = correlation_matrix(&cols(&[&a, &a])).unwrap();
        assert_eq!(correlation_filter(&c, 0.8).unwrap().indices, vec![0]);
        let c = correlation_matrix(&cols(&[&a, &b])).unwrap();
        assert!(c.get(0, 1).abs() < 0.8);
        assert_eq!(correlation_filter(&c, 0.8).unwrap().indices, vec![0, 1]);
        assert!(correlation_filter(&c, 0.0).is_err());
        assert!(correlation_filter(&c, 1.5).is_err());
    }

    #[test]
    fn filter_modes_and_rules_differ_where_expected() {
        let c = CorrelationMatrix {
            values: vec![
                1.0, 0.9, 0.0, -0.9, //
                0.9, 1.0, 0.85, 0.0, //
                0.0, 0.85, 1.0, 0.0, //
                -0.9, 0.0, 0.0, 1.0,
            ],
            column_names: crate::data::default_names(4),
        };
        // 0 drops 1; 1 is gone so it cannot drop 2 under the kept-only rule.
        assert_eq!(correlation_filter(&c, 0.8).unwrap().indices, vec![0, 2, 3]);
        let literal = correlation_filter_with(&c, 0.8, CorrelationMode::Signed, ScanRule::Literal).unwrap();
        assert_eq!(literal.indices, vec![0, 3]);
        let abs = correlation_filter_with(&c, 0.8, CorrelationMode::Absolute, ScanRule::KeptOnly).unwrap();
        assert_eq!(abs.indices, vec![0, 2]);
    }

    fn ranking() -> FeatureRanking {
        FeatureRanking::from_scores(&[0.1, 0.7, 0.3, 0.7])
    }

    #[test]
    fn top_k_follows_ranking() {
        let r = ranking();
        assert_eq!(top_k(&r, 4).unwrap().indices, vec![1, 3, 2, 0]);
        assert_eq!(top_k(&r, 1).unwrap().indices, vec![1]);
        assert_eq!(top_k(&r, 1).unwrap().provenance, Provenance::Shap);
        assert!(top_k(&r, 0).is_err());
        assert!(top_k(&r, 5).is_err());
    }

    #[test]
    fn projection() {
        let d = Dataset::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]], Some(vec![0, 1])).unwrap();
        assert_eq!(project(&d, &FeatureSet::all(2)).unwrap(), d);
        let one = project(&d, &FeatureSet::new(vec![1], Provenance::Shap, 2).unwrap()).unwrap();
        assert_eq!(one.column(0), vec![2.0, 4.0]);
        assert_eq!(one.column_names(), &["f01".to_string()]);
        assert_eq!(one.labels(), Some(&[0u8, 1][..]));
        assert_eq!(project(&one, &FeatureSet::all(1)).unwrap(), one);
        let bad = FeatureSet { indices: vec![2], provenance: Provenance::All };
        assert!(project(&d, &bad).is_err());
        assert!(FeatureSet::new(vec![0, 0], Provenance::All, 2).is_err());
    }
}
