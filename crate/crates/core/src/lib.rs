//! Benign-only autoencoder anomaly scoring with Shapley attribution of the
//! reconstruction error, and the feature-selection strategies built on it.
//!
//! The crate is `no_std` with `alloc`. Everything here is pure computation
//! over in-memory matrices; reading CSVs, persisting models and running the
//! end-to-end protocol lives in the `aeshap` companion crate.
//!
//! ```text
//! data      Dataset, sanitation, split, standard scaling, synthetic flows
//! neural    dense autoencoder, backprop, Adam, reconstruction errors
//! explain   marginalization value function, exact and kernel Shapley
//! features  correlation filter, SHAP top-k, projection
//! eval      confusion metrics, ROC/AUC, G-mean threshold, reports
//! ```
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod data;
pub mod error;
pub mod eval;
pub mod explain;
pub mod features;
mod linalg;
pub mod neural;
pub mod seed;

pub use data::{Dataset, Scaler, SynthSpec};
pub use error::{Error, ErrorKind, Result};
pub use eval::{ClassificationReport, ConfusionCounts, EvalReport, PointMetrics, RocCurve, RocPoint};
pub use explain::{BackgroundSet, Coalition, FeatureRanking, ShapExplanation};
pub use features::{CorrelationMatrix, FeatureSet, Provenance};
pub use neural::{Activation, Autoencoder, AutoencoderConfig, TrainReport};
