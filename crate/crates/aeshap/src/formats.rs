//! On-disk artifact formats. Everything is JSON except the correlation
//! matrix and ROC points, which are CSV for external plotting.

use std::fmt::Write as _;
use std::path::Path;

use aeshap_core::eval::{ClassRow, ClassificationReport, ConfusionCounts, EvalReport, RocCurve};
use aeshap_core::explain::FeatureRanking;
use aeshap_core::features::{CorrelationMatrix, FeatureSet, Provenance};
use aeshap_core::neural::{Activation, Autoencoder, Dense};
use aeshap_core::{Scaler, ShapExplanation, TrainReport};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_all;

pub const MODEL_FORMAT_VERSION: u32 = 1;

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::format(path, e.to_string()))?;
    text.push('\n');
    write_all(path, text.as_bytes())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalerFile {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub columns: Vec<String>,
}

impl From<&Scaler> for ScalerFile {
    fn from(s: &Scaler) -> Self {
        Self { means: s.means.clone(), stds: s.stds.clone(), columns: s.columns.clone() }
    }
}

impl ScalerFile {
    pub fn into_scaler(self, path: &Path) -> Result<Scaler> {
        let n = self.columns.len();
        if self.means.len() != n || self.stds.len() != n {
            return Err(Error::format(path, format!(
                "scaler lists {n} columns but {} means and {} stds",
                self.means.len(),
                self.stds.len()
            )));
        }
        if self.stds.iter().any(|s| !(*s > 0.0 && s.is_finite())) || self.means.iter().any(|m| !m.is_finite()) {
            return Err(Error::format(path, "scaler holds non-finite means or non-positive stds"));
        }
        Ok(Scaler { columns: self.columns, means: self.means, stds: self.stds })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub version: u32,
    pub layer_sizes: Vec<usize>,
    pub activations: Vec<String>,
    /// Row-major `[n_out x n_in]` per layer.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl From<&Autoencoder> for ModelFile {
    fn from(m: &Autoencoder) -> Self {
        Self {
            version: MODEL_FORMAT_VERSION,
            layer_sizes: m.layer_sizes(),
            activations: m.layers().iter().map(|l| l.activation.name().to_string()).collect(),
            weights: m.layers().iter().map(|l| l.weights.clone()).collect(),
            biases: m.layers().iter().map(|l| l.biases.clone()).collect(),
        }
    }
}

impl ModelFile {
    pub fn into_model(self, path: &Path) -> Result<Autoencoder> {
        if self.version != MODEL_FORMAT_VERSION {
            return Err(Error::format(path, format!("unsupported model version {}", self.version)));
        }
        let n_layers = self.layer_sizes.len().saturating_sub(1);
        if n_layers == 0 || self.activations.len() != n_layers || self.weights.len() != n_layers || self.biases.len() != n_layers {
            return Err(Error::format(path, format!(
                "{} layer sizes need {n_layers} activations, weight and bias arrays",
                self.layer_sizes.len()
            )));
        }
        let mut layers = Vec::with_capacity(n_layers);
        for (l, ((act, weights), biases)) in self.activations.iter().zip(self.weights).zip(self.biases).enumerate() {
            let activation = Activation::from_name(act)
                .ok_or_else(|| Error::format(path, format!("layer {l}: unknown activation {act:?}")))?;
            layers.push(Dense { n_in: self.layer_sizes[l], n_out: self.layer_sizes[l + 1], weights, biases, activation });
        }
        Autoencoder::from_layers(layers).map_err(|e| Error::format(path, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReportFile {
    pub initial_train_loss: f64,
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub epochs: usize,
    pub train_rows: usize,
    pub val_rows: usize,
    pub dropped_rows: usize,
}

impl TrainReportFile {
    pub fn new(r: &TrainReport, train_rows: usize, val_rows: usize, dropped_rows: usize) -> Self {
        Self {
            initial_train_loss: r.initial_train_loss,
            train_loss: r.train_loss.clone(),
            val_loss: r.val_loss.clone(),
            epochs: r.epochs,
            train_rows,
            val_rows,
            dropped_rows,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub feature: String,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_index: Option<usize>,
    pub base_value: f64,
    pub model_output: f64,
    /// Sorted by `|phi|`, largest first.
    pub attributions: Vec<Attribution>,
}

impl ExplanationFile {
    pub fn new(e: &ShapExplanation, columns: &[String]) -> Self {
        let mut attributions: Vec<(usize, f64)> = e.attributions.iter().copied().enumerate().collect();
        attributions.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
        Self {
            instance_index: e.instance_index,
            base_value: e.base_value,
            model_output: e.model_output,
            attributions: attributions.into_iter().map(|(i, phi)| Attribution { feature: columns[i].clone(), phi }).collect(),
        }
    }

    /// Restores column order from the feature names.
    pub fn into_explanation(self, columns: &[String], path: &Path) -> Result<ShapExplanation> {
        if self.attributions.len() != columns.len() {
            return Err(Error::format(path, format!(
                "explanation has {} attributions for {} columns",
                self.attributions.len(),
                columns.len()
            )));
        }
        let mut phi = vec![None; columns.len()];
        for a in self.attributions {
            let i = position(columns, &a.feature).ok_or_else(|| Error::format(path, format!("unknown feature {:?}", a.feature)))?;
            if phi[i].replace(a.phi).is_some() {
                return Err(Error::format(path, format!("feature {:?} listed twice", a.feature)));
            }
        }
        Ok(ShapExplanation {
            base_value: self.base_value,
            attributions: phi.into_iter().map(|p| p.unwrap_or(0.0)).collect(),
            model_output: self.model_output,
            instance_index: self.instance_index,
        })
    }
}

fn position(columns: &[String], name: &str) -> Option<usize> {
    columns.iter().position(|c| c == name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedScore {
    pub feature: String,
    pub mean_abs_phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingFile {
    pub scores: Vec<RankedScore>,
    pub n_explained: usize,
    pub budget: usize,
    pub seed: u64,
}

impl RankingFile {
    pub fn new(r: &FeatureRanking, columns: &[String], n_explained: usize, budget: usize, seed: u64) -> Self {
        Self {
            scores: r.entries.iter().map(|e| RankedScore { feature: columns[e.index].clone(), mean_abs_phi: e.score }).collect(),
            n_explained,
            budget,
            seed,
        }
    }

    pub fn to_ranking(&self, columns: &[String], path: &Path) -> Result<FeatureRanking> {
        let mut entries = Vec::with_capacity(self.scores.len());
        for s in &self.scores {
            let index = position(columns, &s.feature)
                .ok_or_else(|| Error::format(path, format!("ranked feature {:?} is not a data column", s.feature)))?;
            entries.push(aeshap_core::explain::RankedFeature { index, score: s.mean_abs_phi });
        }
        Ok(FeatureRanking { entries })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSetFile {
    pub provenance: String,
    pub columns: Vec<String>,
}

impl FeatureSetFile {
    pub fn new(fs: &FeatureSet, columns: &[String]) -> Self {
        Self { provenance: fs.provenance.name().to_string(), columns: fs.indices.iter().map(|&i| columns[i].clone()).collect() }
    }

    /// Resolves the stored names against the header of a dataset.
    pub fn resolve(&self, columns: &[String], path: &Path) -> Result<FeatureSet> {
        let provenance = Provenance::from_name(&self.provenance)
            .ok_or_else(|| Error::format(path, format!("unknown provenance {:?}", self.provenance)))?;
        let indices = self
            .columns
            .iter()
            .map(|name| position(columns, name).ok_or_else(|| Error::format(path, format!("column {name:?} not found in data"))))
            .collect::<Result<Vec<_>>>()?;
        FeatureSet::new(indices, provenance, columns.len()).map_err(|e| Error::format(path, e.to_string()))
    }
}

fn csv_cell(name: &str) -> String {
    if name.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", name.replace('"', "\"\""))
    } else {
        name.to_string()
    }
}

pub fn correlation_csv(c: &CorrelationMatrix) -> String {
    let mut out = String::new();
    for name in &c.column_names {
        out.push(',');
        out.push_str(&csv_cell(name));
    }
    out.push('\n');
    for (i, name) in c.column_names.iter().enumerate() {
        out.push_str(&csv_cell(name));
        for j in 0..c.dim() {
            let _ = write!(out, ",{}", c.get(i, j));
        }
        out.push('\n');
    }
    out
}

pub fn roc_csv(curve: &RocCurve) -> String {
    let mut out = String::from("threshold,fpr,tpr\n");
    for p in &curve.points {
        let _ = writeln!(out, "{},{},{}", p.threshold, p.fpr, p.tpr);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocSummary {
    pub auc: f64,
    pub best_threshold: f64,
    pub g_mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountsFile {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl From<ConfusionCounts> for CountsFile {
    fn from(c: ConfusionCounts) -> Self {
        Self { tp: c.tp, tn: c.tn, fp: c.fp, fn_: c.fn_ }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassRowFile {
    pub precision: f64,
    pub recall: f64,
    pub f1_score: f64,
    pub support: u64,
}

impl From<ClassRow> for ClassRowFile {
    fn from(r: ClassRow) -> Self {
        Self { precision: r.precision, recall: r.recall, f1_score: r.f1, support: r.support }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationFile {
    pub benign: ClassRowFile,
    pub attack: ClassRowFile,
    pub accuracy: f64,
    pub macro_avg: ClassRowFile,
    pub weighted_avg: ClassRowFile,
}

impl From<&ClassificationReport> for ClassificationFile {
    fn from(r: &ClassificationReport) -> Self {
        Self {
            benign: r.classes[0].into(),
            attack: r.classes[1].into(),
            accuracy: r.accuracy,
            macro_avg: r.macro_avg.into(),
            weighted_avg: r.weighted_avg.into(),
        }
    }
}

/// One model's row of the comparison table plus the counts behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReportFile {
    pub model: String,
    pub n_features: usize,
    pub g_mean: f64,
    pub best_threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub accuracy: f64,
    pub auc: f64,
    pub fpr: f64,
    pub specificity: f64,
    pub counts: CountsFile,
    pub classification: ClassificationFile,
}

impl EvalReportFile {
    pub fn new(model: &str, n_features: usize, r: &EvalReport) -> Self {
        Self {
            model: model.to_string(),
            n_features,
            g_mean: r.metrics.g_mean,
            best_threshold: r.threshold,
            precision: r.metrics.precision,
            recall: r.metrics.recall,
            f_score: r.metrics.f_score,
            accuracy: r.metrics.accuracy,
            auc: r.auc,
            fpr: r.metrics.fpr,
            specificity: r.metrics.specificity,
            counts: r.counts.into(),
            classification: (&r.classification).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonFile {
    pub models: Vec<EvalReportFile>,
}

/// Fixed-width comparison table, one row per model.
pub fn comparison_text(c: &ComparisonFile) -> String {
    let mut out = format!(
        "{:<12} {:>8} {:>8} {:>10} {:>9} {:>7} {:>8} {:>8} {:>6}\n",
        "model", "features", "g_mean", "threshold", "precision", "recall", "f_score", "accuracy", "auc"
    );
    for m in &c.models {
        let _ = writeln!(
            out,
            "{:<12} {:>8} {:>8.3} {:>10.4} {:>9.2} {:>7.2} {:>8.2} {:>8.2} {:>6.3}",
            m.model, m.n_features, m.g_mean, m.best_threshold, m.precision, m.recall, m.f_score, m.accuracy, m.auc
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use aeshap_core::neural::{self, AutoencoderConfig};

    #[test]
    fn model_round_trip_is_exact() {
        let mut cfg = AutoencoderConfig::with_hidden(5, &[4, 2, 4]);
        cfg.seed = 3;
        let model = neural::init_model(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("model.json");
        save_json(&p, &ModelFile::from(&model)).unwrap();
        let back = load_json::<ModelFile>(&p).unwrap().into_model(&p).unwrap();
        assert_eq!(back.layers(), model.layers());
        assert_eq!(back.layer_sizes(), vec![5, 4, 2, 4, 5]);

        let mut bad = ModelFile::from(&model);
        bad.version = 2;
        assert!(bad.into_model(&p).is_err());
        let mut bad = ModelFile::from(&model);
        bad.activations[0] = "tanh".into();
        assert!(bad.into_model(&p).unwrap_err().to_string().contains("tanh"));
    }

    #[test]
    fn explanation_sorted_by_magnitude_and_restored() {
        let cols: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let e = ShapExplanation { base_value: 0.5, attributions: vec![0.1, -0.4, 0.2], model_output: 0.4, instance_index: Some(7) };
        let f = ExplanationFile::new(&e, &cols);
        let order: Vec<&str> = f.attributions.iter().map(|a| a.feature.as_str()).collect();
        assert_eq!(order, ["b", "c", "a"]);
        assert_eq!(f.clone().into_explanation(&cols, Path::new("x")).unwrap(), e);
        let json = serde_json::to_value(&f).unwrap();
        assert_eq!(json["instance_index"], 7);
        assert_eq!(json["attributions"][0]["phi"], -0.4);
    }

    #[test]
    fn feature_sets_resolve_by_name() {
        let cols: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let fs = FeatureSet::new(vec![2, 0], Provenance::Shap, 3).unwrap();
        let f = FeatureSetFile::new(&fs, &cols);
        assert_eq!(f.columns, ["z", "x"]);
        let other: Vec<String> = ["z", "q", "x"].iter().map(|s| s.to_string()).collect();
        assert_eq!(f.resolve(&other, Path::new("f")).unwrap().indices, vec![0, 2]);
        let short: Vec<String> = vec!["x".into()];
        assert!(f.resolve(&short, Path::new("f")).unwrap_err().to_string().contains("\"z\""));
    }

    #[test]
    fn csv_exports() {
        let c = CorrelationMatrix { values: vec![1.0, -0.5, -0.5, 1.0], column_names: vec!["a,b".into(), "c".into()] };
        assert_eq!(correlation_csv(&c), ",\"a,b\",c\n\"a,b\",1,-0.5\nc,-0.5,1\n");
        let curve = aeshap_core::eval::roc_curve(&[0.1, 0.9], &[0, 1]).unwrap();
        let text = roc_csv(&curve);
        assert!(text.starts_with("threshold,fpr,tpr\n"));
        assert_eq!(text.lines().count(), 1 + curve.points.len());
    }

    #[test]
    fn scaler_file_validates() {
        let p = Path::new("s.json");
        let f = ScalerFile { means: vec![0.0], stds: vec![1.0, 2.0], columns: vec!["a".into()] };
        assert!(f.into_scaler(p).is_err());
        let f = ScalerFile { means: vec![0.0], stds: vec![0.0], columns: vec!["a".into()] };
        assert!(f.into_scaler(p).is_err());
        let json = r#"{"means":[1.5],"stds":[0.25],"columns":["a"]}"#;
        let s = serde_json::from_str::<ScalerFile>(json).unwrap().into_scaler(p).unwrap();
        assert_eq!((s.means[0], s.stds[0]), (1.5, 0.25));
    }
}
