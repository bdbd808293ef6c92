use std::path::{Path, PathBuf};

use aeshap_core::data::SynthSpec;
use aeshap_core::features::FeatureSet;
use aeshap_core::seed::{self, Stage};
use clap::{Args, Parser, Subcommand};
use log::info;

use crate::config::PipelineConfig;
use crate::error::{Result, StageContext};
use crate::formats::{self, FeatureSetFile, RankingFile};
use crate::io;
use crate::stages::{self, Run, SynthPlan};

#[derive(Debug, Parser)]
#[command(name = "aeshap", version, about = "Autoencoder anomaly detection with Shapley-value feature selection")]
pub struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train an autoencoder on the benign training CSV.
    Train {
        /// Feature-set JSON to train on instead of all columns.
        #[arg(long, value_name = "FILE")]
        features: Option<PathBuf>,
    },
    /// Explain seeded attack rows of the test CSV with kernel SHAP.
    Explain {
        /// Directory holding model.json, scaler.json and features.json.
        #[arg(long, value_name = "DIR")]
        model: PathBuf,
    },
    /// Aggregate explanation files into a ranking and a top-k feature set.
    Rank {
        #[arg(long, value_name = "DIR")]
        model: PathBuf,
        #[arg(long, value_name = "DIR")]
        explanations: PathBuf,
        /// Number of features to keep; defaults to select.top_k.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Drop correlated features of the benign training split.
    SelectCorr,
    /// Score the test CSV and write ROC, threshold and classification reports.
    Evaluate {
        #[arg(long, value_name = "DIR")]
        model: PathBuf,
        /// Feature-set JSON overriding the model directory's own.
        #[arg(long, value_name = "FILE")]
        features: Option<PathBuf>,
    },
    /// Build, explain and compare the three models end to end.
    Pipeline,
    /// Write a labelled synthetic train/test pair with known anomalous columns.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long = "n-features", default_value_t = 20)]
    pub n_features: usize,
    /// Comma-separated column indices shifted in attack rows.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 5, 9, 11, 17])]
    pub anomalous: Vec<usize>,
    /// Attack shift in benign standard deviations.
    #[arg(long, default_value_t = 4.0)]
    pub shift: f64,
    #[arg(long, default_value_t = 5000)]
    pub benign: usize,
    #[arg(long, default_value_t = 1000)]
    pub attack: usize,
    /// Benign rows that go to train.csv; the others go to test.csv.
    #[arg(long = "train-benign", default_value_t = 3000)]
    pub train_benign: usize,
}

impl Cli {
    pub fn load_config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = cli.load_config()?;
    let out = cli.out.as_path();
    match &cli.command {
        Command::Train { features } => train(&cfg, out, features.as_deref()),
        Command::Explain { model } => explain(&cfg, out, model),
        Command::Rank { model, explanations, k } => rank(&cfg, out, model, explanations, k.unwrap_or(cfg.select.top_k)),
        Command::SelectCorr => select_corr(&cfg, out),
        Command::Evaluate { model, features } => evaluate(&cfg, out, model, features.as_deref()),
        Command::Pipeline => {
            let comparison = stages::pipeline(&cfg, out)?;
            print!("{}", formats::comparison_text(&comparison));
            Ok(())
        }
        Command::Synth(args) => synth(&cfg, out, args),
    }
}

fn train(cfg: &PipelineConfig, out: &Path, features: Option<&Path>) -> Result<()> {
    let mut run = Run::new("train", cfg, out)?;
    let benign = stages::load_benign(cfg).stage("load-train")?;
    let columns = benign.train.column_names();
    let fs = match features {
        Some(p) => formats::load_json::<FeatureSetFile>(p)?.resolve(columns, p).stage("train")?,
        None => FeatureSet::all(columns.len()),
    };
    let tm = stages::train_model(&benign, &fs, cfg).stage("train")?;
    let written = stages::write_model(out, &tm, &benign).stage("train")?;
    let mut inputs = vec![cfg.data.train_csv.as_path()];
    inputs.extend(features);
    run.record_stage("train", &inputs, &written);
    run.finish()?;
    Ok(())
}

fn explain(cfg: &PipelineConfig, out: &Path, model: &Path) -> Result<()> {
    let mut run = Run::new("explain", cfg, out)?;
    let benign = stages::load_benign(cfg).stage("load-train")?;
    let test = stages::load_test(cfg).stage("load-test")?;
    let columns = benign.train.column_names();
    let tm = stages::read_model(model, None, columns).stage("explain")?;
    let explanations = stages::explain_attacks(&tm, &benign, &test, cfg).stage("explain")?;
    let names = tm.feature_names(columns);
    let mut written = stages::write_explanations(&out.join("explanations"), &explanations, &names).stage("explain")?;
    let ranking = aeshap_core::explain::aggregate_importance(&explanations).stage("explain")?;
    let path = out.join("ranking.json");
    formats::save_json(&path, &RankingFile::new(&ranking, &names, explanations.len(), cfg.explain.budget, cfg.seed))?;
    written.push(path);
    run.record_stage("explain", &[cfg.data.train_csv.as_path(), cfg.data.test_csv.as_path(), model], &written);
    run.finish()?;
    Ok(())
}

fn rank(cfg: &PipelineConfig, out: &Path, model: &Path, explanations: &Path, k: usize) -> Result<()> {
    let mut run = Run::new("rank", cfg, out)?;
    let fs_path = model.join("features.json");
    let fs_file = formats::load_json::<FeatureSetFile>(&fs_path).stage("rank")?;
    let names = fs_file.columns.clone();
    let expl = stages::read_explanations(explanations, &names).stage("rank")?;
    let ranking = aeshap_core::explain::aggregate_importance(&expl).stage("rank")?;
    let top = aeshap_core::features::top_k(&ranking, k).stage("rank")?;
    let paths = [out.join("ranking.json"), out.join("features.json")];
    formats::save_json(&paths[0], &RankingFile::new(&ranking, &names, expl.len(), cfg.explain.budget, cfg.seed))?;
    formats::save_json(&paths[1], &FeatureSetFile::new(&top, &names))?;
    run.record_stage("rank", &[&fs_path, explanations], &paths);
    run.finish()?;
    Ok(())
}

fn select_corr(cfg: &PipelineConfig, out: &Path) -> Result<()> {
    let mut run = Run::new("select-corr", cfg, out)?;
    let benign = stages::load_benign(cfg).stage("load-train")?;
    let (c, fs) = stages::select_correlated(&benign, cfg).stage("select-corr")?;
    let paths = [out.join("correlation.csv"), out.join("features.json")];
    io::write_all(&paths[0], formats::correlation_csv(&c).as_bytes())?;
    formats::save_json(&paths[1], &FeatureSetFile::new(&fs, benign.train.column_names()))?;
    run.record_stage("select-corr", &[cfg.data.train_csv.as_path()], &paths);
    run.finish()?;
    Ok(())
}

fn evaluate(cfg: &PipelineConfig, out: &Path, model: &Path, features: Option<&Path>) -> Result<()> {
    let mut run = Run::new("evaluate", cfg, out)?;
    let test = stages::load_test(cfg).stage("load-test")?;
    let tm = stages::read_model(model, features, test.column_names()).stage("evaluate")?;
    let (curve, report) = stages::evaluate(&tm, &test).stage("evaluate")?;
    let name = model.file_name().map_or_else(|| "model".to_string(), |n| n.to_string_lossy().into_owned());
    let (_, written) = stages::write_evaluation(out, &name, tm.features.len(), &curve, &report).stage("evaluate")?;
    let mut inputs = vec![cfg.data.test_csv.as_path(), model];
    inputs.extend(features);
    run.record_stage("evaluate", &inputs, &written);
    run.finish()?;
    print!("{}", report.classification.to_text());
    Ok(())
}

fn synth(cfg: &PipelineConfig, out: &Path, a: &SynthArgs) -> Result<()> {
    let mut run = Run::new("synth", cfg, out)?;
    let plan = SynthPlan {
        spec: SynthSpec {
            n_features: a.n_features,
            n_benign: a.benign,
            n_attack: a.attack,
            anomalous_features: a.anomalous.clone(),
            shift_magnitude: a.shift,
            seed: seed::derive(cfg.seed, Stage::Synthetic),
        },
        train_benign: a.train_benign,
    };
    let written = stages::synth(&plan, cfg, out).stage("synth")?;
    info!("wrote {} and {}", written[0].display(), written[1].display());
    run.record_stage("synth", &[], &written);
    run.finish()?;
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I: IntoIterator<Item = std::ffi::OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
