use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] wlmvdr_core::Error),
    #[error("unknown preset `{0}` (expected one of: {1})")]
    UnknownPreset(String, String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("failed to parse config {path}: {source}")]
    ConfigParse { path: PathBuf, source: toml::de::Error },
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
