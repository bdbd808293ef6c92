//! Pipeline configuration, read from TOML. Every field has a default, so an
//! empty file (or no file) yields the reference setup.

use std::path::{Path, PathBuf};

use aeshap_core::explain::DEFAULT_BUDGET;
use aeshap_core::features::{CorrelationMode, ScanRule};
use aeshap_core::neural::{AutoencoderConfig, REFERENCE_HIDDEN};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub data: DataConfig,
    pub model: ModelConfig,
    pub explain: ExplainConfig,
    pub select: SelectConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Benign traffic used for training and validation. A label column, if
    /// present, is used to keep benign rows only.
    pub train_csv: PathBuf,
    /// Labelled traffic used for explanation and evaluation.
    pub test_csv: PathBuf,
    pub label_column: String,
    pub benign_label: String,
    pub train_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub l2_coefficient: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplainConfig {
    pub background_size: usize,
    pub n_explain: usize,
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Signed,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanName {
    KeptOnly,
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectConfig {
    pub correlation_threshold: f64,
    pub correlation_mode: ModeName,
    pub scan_rule: ScanName,
    pub top_k: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            train_csv: "train.csv".into(),
            test_csv: "test.csv".into(),
            label_column: "Label".into(),
            benign_label: "BENIGN".into(),
            train_fraction: 0.67,
        }
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        let reference = AutoencoderConfig::reference(1);
        Self {
            hidden: REFERENCE_HIDDEN.to_vec(),
            learning_rate: reference.learning_rate,
            l2_coefficient: reference.l2_coefficient,
            epochs: reference.epochs,
            batch_size: reference.batch_size,
        }
    }
}

impl Default for ExplainConfig {
    fn default() -> Self {
        Self { background_size: 200, n_explain: 100, budget: DEFAULT_BUDGET }
    }
}

impl Default for SelectConfig {
    fn default() -> Self {
        Self { correlation_threshold: 0.8, correlation_mode: ModeName::Signed, scan_rule: ScanName::KeptOnly, top_k: 30 }
    }
}

impl PipelineConfig {
    /// Parses a TOML file. Relative data paths are taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.data.train_csv, &mut cfg.data.test_csv] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let d = &self.data;
        if !(d.train_fraction > 0.0 && d.train_fraction < 1.0) {
            return bad(format!("data.train_fraction must lie in (0, 1), got {}", d.train_fraction));
        }
        if d.label_column.is_empty() {
            return bad("data.label_column must not be empty".into());
        }
        self.autoencoder(1).validate().map_err(|e| Error::Config(format!("model: {e}")))?;
        let e = &self.explain;
        if e.background_size == 0 || e.n_explain == 0 || e.budget == 0 {
            return bad("explain.background_size, n_explain and budget must all be at least 1".into());
        }
        let s = &self.select;
        if !(s.correlation_threshold > 0.0 && s.correlation_threshold <= 1.0) {
            return bad(format!("select.correlation_threshold must lie in (0, 1], got {}", s.correlation_threshold));
        }
        if s.top_k == 0 {
            return bad("select.top_k must be at least 1".into());
        }
        Ok(())
    }

    /// Network for `input_dim` features; every model shares the master seed.
    pub fn autoencoder(&self, input_dim: usize) -> AutoencoderConfig {
        let m = &self.model;
        let mut cfg = AutoencoderConfig::with_hidden(input_dim, &m.hidden);
        cfg.learning_rate = m.learning_rate;
        cfg.l2_coefficient = m.l2_coefficient;
        cfg.epochs = m.epochs;
        cfg.batch_size = m.batch_size;
        cfg.seed = self.seed;
        cfg
    }

    pub fn correlation_mode(&self) -> CorrelationMode {
        match self.select.correlation_mode {
            ModeName::Signed => CorrelationMode::Signed,
            ModeName::Absolute => CorrelationMode::Absolute,
        }
    }

    pub fn scan_rule(&self) -> ScanRule {
        match self.select.scan_rule {
            ScanName::KeptOnly => ScanRule::KeptOnly,
            ScanName::Literal => ScanRule::Literal,
        }
    }
}
