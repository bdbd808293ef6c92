//! The protocol stages: train, explain, rank, correlation selection,
//! evaluation, and the three-model pipeline built from them.
//!
//! Every stage derives its randomness from the master seed, so the three
//! models of a pipeline run differ only in their feature sets and a stage
//! run on its own reproduces the pipeline's artifacts.

use std::path::{Path, PathBuf};

use aeshap_core::data::{self, Dataset, SynthSpec};
use aeshap_core::eval::{self, EvalReport, RocCurve};
use aeshap_core::explain::{self, BackgroundSet, FeatureRanking, ShapExplanation};
use aeshap_core::features::{self, CorrelationMatrix, FeatureSet, Provenance};
use aeshap_core::neural::{self, Autoencoder};
use aeshap_core::seed::{self, Stage};
use aeshap_core::{Scaler, TrainReport};
use log::info;
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::{Error, Result, StageContext};
use crate::formats::{self, *};
use crate::io;

pub const MODEL_NAMES: [&str; 3] = ["Model_1", "Model_2", "SHAP_Model"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

/// Lists what each stage of a run read and wrote.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
}

/// Output directory plus the manifest being assembled for it.
pub struct Run {
    pub out: PathBuf,
    manifest: Manifest,
}

impl Run {
    pub fn new(command: &str, cfg: &PipelineConfig, out: &Path) -> Result<Self> {
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        Ok(Self {
            out: out.to_path_buf(),
            manifest: Manifest { command: command.into(), config_sha256: cfg.hash(), seed: cfg.seed, stages: Vec::new() },
        })
    }

    /// `p` relative to the output directory when inside it.
    pub fn rel(&self, p: &Path) -> String {
        let shown = p.strip_prefix(&self.out).unwrap_or(p);
        shown.to_string_lossy().replace('\\', "/")
    }

    pub fn record_stage(&mut self, stage: &str, inputs: &[&Path], outputs: &[PathBuf]) {
        let inputs = inputs.iter().map(|p| self.rel(p)).collect();
        let outputs = outputs.iter().map(|p| self.rel(p)).collect();
        self.manifest.stages.push(StageRecord { stage: stage.into(), inputs, outputs });
    }

    pub fn finish(self) -> Result<Manifest> {
        formats::save_json(&self.out.join("manifest.json"), &self.manifest)?;
        Ok(self.manifest)
    }
}

/// Sanitized benign rows split into training and validation parts.
pub struct BenignData {
    pub train: Dataset,
    pub val: Dataset,
    pub dropped: usize,
}

pub fn load_benign(cfg: &PipelineConfig) -> Result<BenignData> {
    let path = &cfg.data.train_csv;
    let d = if io::has_column(path, &cfg.data.label_column)? {
        let all = io::load_csv(path, Some(&cfg.data.label_column), &cfg.data.benign_label)?;
        all.rows_with_label(0).without_labels()
    } else {
        io::load_csv(path, None, &cfg.data.benign_label)?
    };
    let (clean, dropped) = data::sanitize(&d)?;
    let (train, val) = data::split_train_val(&clean, cfg.data.train_fraction, seed::derive(cfg.seed, Stage::Split))?;
    info!("benign data: {} train rows, {} validation rows, {dropped} non-finite rows dropped", train.n_rows(), val.n_rows());
    Ok(BenignData { train, val, dropped })
}

/// Sanitized labelled test rows.
pub fn load_test(cfg: &PipelineConfig) -> Result<Dataset> {
    let d = io::load_csv(&cfg.data.test_csv, Some(&cfg.data.label_column), &cfg.data.benign_label)?;
    let (clean, dropped) = data::sanitize(&d)?;
    let attacks = clean.labels().map_or(0, |l| l.iter().filter(|&&v| v == 1).count());
    info!("test data: {} rows ({attacks} attacks), {dropped} non-finite rows dropped", clean.n_rows());
    Ok(clean)
}

/// An autoencoder with the feature set and scaler it was trained on.
/// Feature indices refer to the columns of the data files.
pub struct TrainedModel {
    pub features: FeatureSet,
    pub scaler: Scaler,
    pub model: Autoencoder,
    pub report: Option<TrainReport>,
}

impl TrainedModel {
    /// Projects `d` onto the model's features and standardizes it.
    pub fn prepare(&self, d: &Dataset) -> Result<Dataset> {
        if self.features.len() != self.model.input_dim() {
            return Err(aeshap_core::Error::DimensionMismatch {
                what: "feature set vs model input",
                expected: self.model.input_dim(),
                actual: self.features.len(),
            }
            .into());
        }
        let projected = features::project(d, &self.features)?;
        Ok(self.scaler.transform(&projected)?)
    }

    pub fn scores(&self, d: &Dataset) -> Result<Vec<f64>> {
        Ok(self.model.reconstruction_errors(&self.prepare(d)?)?)
    }

    pub fn feature_names(&self, columns: &[String]) -> Vec<String> {
        self.features.indices.iter().map(|&i| columns[i].clone()).collect()
    }
}

pub fn train_model(benign: &BenignData, fs: &FeatureSet, cfg: &PipelineConfig) -> Result<TrainedModel> {
    let train = features::project(&benign.train, fs)?;
    let val = features::project(&benign.val, fs)?;
    let scaler = data::fit_scaler(&train)?;
    let net = cfg.autoencoder(fs.len());
    let mut model = neural::init_model(&net)?;
    let report = neural::fit(&mut model, &scaler.transform(&train)?, &scaler.transform(&val)?, &net)?;
    info!(
        "trained {} features: train loss {:.6} -> {:.6}, validation loss {:.6}",
        fs.len(),
        report.initial_train_loss,
        report.train_loss.last().copied().unwrap_or(f64::NAN),
        report.val_loss.last().copied().unwrap_or(f64::NAN)
    );
    Ok(TrainedModel { features: fs.clone(), scaler, model, report: Some(report) })
}

pub fn write_model(dir: &Path, tm: &TrainedModel, benign: &BenignData) -> Result<Vec<PathBuf>> {
    let columns = benign.train.column_names();
    let paths = ["model.json", "scaler.json", "features.json", "train_report.json"].map(|f| dir.join(f));
    formats::save_json(&paths[0], &ModelFile::from(&tm.model))?;
    formats::save_json(&paths[1], &ScalerFile::from(&tm.scaler))?;
    formats::save_json(&paths[2], &FeatureSetFile::new(&tm.features, columns))?;
    let report = tm.report.as_ref().expect("freshly trained model carries its report");
    let file = TrainReportFile::new(report, benign.train.n_rows(), benign.val.n_rows(), benign.dropped);
    formats::save_json(&paths[3], &file)?;
    Ok(paths.to_vec())
}

/// Loads `model.json` and `scaler.json` from `dir`, and the feature set from
/// `features` (default `dir/features.json`), resolved against `columns`.
pub fn read_model(dir: &Path, features: Option<&Path>, columns: &[String]) -> Result<TrainedModel> {
    let model_path = dir.join("model.json");
    let scaler_path = dir.join("scaler.json");
    let fs_path = features.map_or_else(|| dir.join("features.json"), Path::to_path_buf);
    let model = formats::load_json::<ModelFile>(&model_path)?.into_model(&model_path)?;
    let scaler = formats::load_json::<ScalerFile>(&scaler_path)?.into_scaler(&scaler_path)?;
    let fs = formats::load_json::<FeatureSetFile>(&fs_path)?.resolve(columns, &fs_path)?;
    for (what, n) in [("feature set vs model input", fs.len()), ("scaler vs model input", scaler.dim())] {
        if n != model.input_dim() {
            return Err(aeshap_core::Error::DimensionMismatch { what, expected: model.input_dim(), actual: n }.into());
        }
    }
    Ok(TrainedModel { features: fs, scaler, model, report: None })
}

/// The first `B` rows of a seeded shuffle of the scaled training split.
pub fn background(tm: &TrainedModel, benign: &BenignData, cfg: &PipelineConfig) -> Result<BackgroundSet> {
    let scaled = tm.prepare(&benign.train)?;
    let order = seed::permutation(scaled.n_rows(), seed::derive(cfg.seed, Stage::Background));
    let take = cfg.explain.background_size.min(order.len());
    if take < cfg.explain.background_size {
        info!("only {take} training rows available for a background of {}", cfg.explain.background_size);
    }
    Ok(BackgroundSet::from_dataset(&scaled.select_rows(&order[..take]))?)
}

/// Kernel SHAP explanations of up to `n_explain` seeded attack rows of
/// `test`, in ascending row order. `instance_index` is the row in `test`.
pub fn explain_attacks(tm: &TrainedModel, benign: &BenignData, test: &Dataset, cfg: &PipelineConfig) -> Result<Vec<ShapExplanation>> {
    let labels = test.labels().ok_or(aeshap_core::Error::EmptyInput("test data has no labels"))?;
    let attacks: Vec<usize> = (0..test.n_rows()).filter(|&i| labels[i] == 1).collect();
    if attacks.is_empty() {
        return Err(aeshap_core::Error::EmptyInput("no attack rows to explain").into());
    }
    let order = seed::permutation(attacks.len(), seed::derive(cfg.seed, Stage::ExplainSelection));
    let mut chosen: Vec<usize> = order.iter().take(cfg.explain.n_explain).map(|&k| attacks[k]).collect();
    chosen.sort_unstable();

    let bg = background(tm, benign, cfg)?;
    let scaled = tm.prepare(&test.select_rows(&chosen))?;
    let coalition_seed = seed::derive(cfg.seed, Stage::Coalitions);
    info!("explaining {} attack rows against {} background rows, budget {}", chosen.len(), bg.len(), cfg.explain.budget);
    chosen
        .iter()
        .zip(scaled.rows())
        .map(|(&row, x)| {
            let mut e = explain::kernel_shap_explain(
                &tm.model,
                x,
                &bg,
                cfg.explain.budget,
                seed::derive_indexed(coalition_seed, row as u64),
            )?;
            e.instance_index = Some(row);
            Ok(e)
        })
        .collect()
}

pub fn write_explanations(dir: &Path, explanations: &[ShapExplanation], names: &[String]) -> Result<Vec<PathBuf>> {
    explanations
        .iter()
        .map(|e| {
            let p = dir.join(format!("instance_{:06}.json", e.instance_index.unwrap_or(0)));
            formats::save_json(&p, &ExplanationFile::new(e, names))?;
            Ok(p)
        })
        .collect()
}

/// Reads every `*.json` explanation in `dir`, in file-name order.
pub fn read_explanations(dir: &Path, names: &[String]) -> Result<Vec<ShapExplanation>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|p| formats::load_json::<ExplanationFile>(p)?.into_explanation(names, p))
        .collect()
}

/// Mean-|phi| ranking over model features, and its top-k as data columns.
pub fn rank(tm: &TrainedModel, explanations: &[ShapExplanation], k: usize) -> Result<(FeatureRanking, FeatureSet)> {
    let ranking = explain::aggregate_importance(explanations)?;
    let top = features::top_k(&ranking, k)?;
    let indices = top.indices.iter().map(|&i| tm.features.indices[i]).collect();
    Ok((ranking, FeatureSet { indices, provenance: Provenance::Shap }))
}

/// Correlation filter over the raw benign training split.
pub fn select_correlated(benign: &BenignData, cfg: &PipelineConfig) -> Result<(CorrelationMatrix, FeatureSet)> {
    let c = features::correlation_matrix(&benign.train)?;
    let fs = features::correlation_filter_with(&c, cfg.select.correlation_threshold, cfg.correlation_mode(), cfg.scan_rule())?;
    info!("correlation filter kept {} of {} features", fs.len(), c.dim());
    Ok((c, fs))
}

pub fn evaluate(tm: &TrainedModel, test: &Dataset) -> Result<(RocCurve, EvalReport)> {
    let labels = test.labels().ok_or(aeshap_core::Error::EmptyInput("test data has no labels"))?;
    let scores = tm.scores(test)?;
    Ok(eval::evaluate(&scores, labels)?)
}

pub fn write_evaluation(dir: &Path, name: &str, n_features: usize, curve: &RocCurve, report: &EvalReport) -> Result<(EvalReportFile, Vec<PathBuf>)> {
    let paths = ["roc.csv", "roc.json", "report.json", "report.txt"].map(|f| dir.join(f));
    io::write_all(&paths[0], formats::roc_csv(curve).as_bytes())?;
    let summary = RocSummary { auc: curve.auc, best_threshold: report.threshold, g_mean: report.metrics.g_mean };
    formats::save_json(&paths[1], &summary)?;
    let file = EvalReportFile::new(name, n_features, report);
    formats::save_json(&paths[2], &file)?;
    io::write_all(&paths[3], report.classification.to_text().as_bytes())?;
    info!("{name}: auc {:.4}, g-mean {:.4} at threshold {}", curve.auc, report.metrics.g_mean, report.threshold);
    Ok((file, paths.to_vec()))
}

fn dir_name(model: &str) -> String {
    model.to_lowercase()
}

/// Trains the all-features, correlation-filtered and SHAP top-k models on
/// the same split with the same seeds and compares them on the test set.
pub fn pipeline(cfg: &PipelineConfig, out: &Path) -> Result<ComparisonFile> {
    let mut run = Run::new("pipeline", cfg, out)?;
    let train_csv = cfg.data.train_csv.as_path();
    let test_csv = cfg.data.test_csv.as_path();

    let benign = load_benign(cfg).stage("load-train")?;
    let test = load_test(cfg).stage("load-test")?;
    if test.column_names() != benign.train.column_names() {
        return Err(Error::Config("train and test CSVs have different feature columns".into())).stage("load-test");
    }
    let columns = benign.train.column_names().to_vec();

    let d = columns.len();
    let m1_dir = out.join(dir_name(MODEL_NAMES[0]));
    let m1 = train_model(&benign, &FeatureSet::all(d), cfg).stage("train")?;
    let written = write_model(&m1_dir, &m1, &benign).stage("train")?;
    run.record_stage("train Model_1", &[train_csv], &written);

    let explanations = explain_attacks(&m1, &benign, &test, cfg).stage("explain")?;
    let names = m1.feature_names(&columns);
    let mut written = write_explanations(&out.join("explanations"), &explanations, &names).stage("explain")?;
    let (ranking, shap_fs) = rank(&m1, &explanations, cfg.select.top_k).stage("rank")?;
    let ranking_path = out.join("ranking.json");
    let ranking_file = RankingFile::new(&ranking, &names, explanations.len(), cfg.explain.budget, cfg.seed);
    formats::save_json(&ranking_path, &ranking_file).stage("rank")?;
    written.push(ranking_path);
    run.record_stage("explain", &[train_csv, test_csv, &m1_dir], &written);

    let (corr, corr_fs) = select_correlated(&benign, cfg).stage("select-corr")?;
    let corr_path = out.join("correlation.csv");
    io::write_all(&corr_path, formats::correlation_csv(&corr).as_bytes()).stage("select-corr")?;
    run.record_stage("select-corr", &[train_csv], &[corr_path]);

    let mut models = vec![(MODEL_NAMES[0], m1)];
    for (name, fs) in [(MODEL_NAMES[1], corr_fs), (MODEL_NAMES[2], shap_fs)] {
        let tm = train_model(&benign, &fs, cfg).stage("train")?;
        let written = write_model(&out.join(dir_name(name)), &tm, &benign).stage("train")?;
        run.record_stage(&format!("train {name}"), &[train_csv], &written);
        models.push((name, tm));
    }

    let mut comparison = ComparisonFile { models: Vec::new() };
    for (name, tm) in &models {
        let dir = out.join(dir_name(name));
        let (curve, report) = evaluate(tm, &test).stage("evaluate")?;
        let (file, written) = write_evaluation(&dir, name, tm.features.len(), &curve, &report).stage("evaluate")?;
        run.record_stage(&format!("evaluate {name}"), &[test_csv, &dir], &written);
        comparison.models.push(file);
    }

    let paths = [out.join("comparison.json"), out.join("comparison.txt")];
    formats::save_json(&paths[0], &comparison)?;
    io::write_all(&paths[1], formats::comparison_text(&comparison).as_bytes())?;
    run.record_stage("compare", &[], &paths);
    run.finish()?;
    Ok(comparison)
}

/// Parameters of the `synth` command.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthPlan {
    pub spec: SynthSpec,
    /// Benign rows written to the training CSV; the rest go to the test CSV.
    pub train_benign: usize,
}

/// Writes `train.csv` (benign) and `test.csv` (benign and attack) into `out`.
pub fn synth(plan: &SynthPlan, cfg: &PipelineConfig, out: &Path) -> Result<Vec<PathBuf>> {
    if plan.train_benign == 0 || plan.train_benign >= plan.spec.n_benign {
        return Err(Error::Config(format!(
            "train_benign must lie in 1..{}, got {}",
            plan.spec.n_benign, plan.train_benign
        )));
    }
    let d = data::generate_synthetic(&plan.spec)?;
    let train: Vec<usize> = (0..plan.train_benign).collect();
    let test: Vec<usize> = (plan.train_benign..d.n_rows()).collect();
    let paths = [out.join("train.csv"), out.join("test.csv")];
    let label = &cfg.data.label_column;
    io::write_csv(&paths[0], &d.select_rows(&train), label, &cfg.data.benign_label, "ATTACK")?;
    io::write_csv(&paths[1], &d.select_rows(&test), label, &cfg.data.benign_label, "ATTACK")?;
    Ok(paths.to_vec())
}
