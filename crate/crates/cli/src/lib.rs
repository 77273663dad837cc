//! Command-line driver for the chansim channel models.
//!
//! A run is described by a TOML [`RunConfig`]. Every command writes plain
//! CSV artifacts plus a `manifest.json` holding the sha256 of the effective
//! configuration and of each artifact. Output depends only on the config
//! and seed, never on the worker count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

pub use commands::{
    run_drops, run_figure_suite, run_pathloss_sweep, run_statistics, sweep_rows, DropSummary, FigureSummary, ParamStat,
    SweepRow,
};
pub use config::{
    parse_config, parse_config_str, FigureSection, LinkSection, O2iSection, RunConfig, StateChoice, SweepSection,
    TrajectorySection,
};
pub use output::{Artifact, Manifest, OutputBundle};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] chansim_core::Error),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 config, 3 model validity, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(e) if e.is_model_validity() => 3,
            CliError::Model(_) => 2,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Run `f` on a pool of `workers` threads (all cores when `None`).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be >= 1".into()));
        }
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(pool.install(f))
}
