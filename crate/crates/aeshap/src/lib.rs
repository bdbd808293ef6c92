//! File formats, CSV ingestion and the command-line pipeline around
//! [`aeshap_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod io;
pub mod stages;

pub use config::PipelineConfig;
pub use error::{Error, Result};
