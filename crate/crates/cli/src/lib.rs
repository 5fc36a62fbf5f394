//! Experiment harness for the WL MVDR / Capon gain analysis.
//!
//! A run is described by an [`ExperimentConfig`] (a TOML file or one of the
//! figure [presets](preset::figure_preset)). [`run_theory`] evaluates the
//! closed forms and their strong-interference approximations,
//! [`run_simulation`] measures the same quantities by Monte Carlo, and
//! [`output::emit`] writes CSV or a gnuplot script.

pub mod config;
mod error;
pub mod output;
pub mod preset;
pub mod runner;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, GridPoint, SweepVariable};
pub use error::{CliError, Result};
pub use output::{emit, Format, ResultRow, Source};
pub use preset::figure_preset;
pub use runner::{check, compare, run_simulation, run_theory};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "WLMVDR_OUT_DIR";

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::PlotScript => "gp",
        }
    }
}

/// Output file of a run: `--out`, else the config's `output`, else
/// `<name>.<ext>` in `$WLMVDR_OUT_DIR` (or the working directory).
pub fn resolve_output(name: &str, cfg: &ExperimentConfig, out: Option<&Path>, format: Format) -> PathBuf {
    if let Some(p) = out.or(cfg.output.as_deref()) {
        return p.to_owned();
    }
    let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_default();
    dir.join(format!("{name}.{}", format.extension()))
}

/// `base` with `suffix` appended to its file stem.
pub fn series_path(base: &Path, suffix: &str) -> PathBuf {
    if suffix.is_empty() {
        return base.to_owned();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    base.with_file_name(name)
}
