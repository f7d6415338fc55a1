//! Configuration, orchestration and artifact output for `gevrey-flow` runs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::Path;

use serde::Serialize;

pub use commands::{run, Command, Outcome};
pub use config::RunConfig;
pub use output::{read_field_dump, FieldRecord};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "GEVREY_FLOW_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] gevrey_flow::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Run(_) | Self::Io { .. } => EXIT_CHECK_FAILED,
        }
    }
}

/// Report envelope written for every command.
#[derive(Debug, Serialize)]
pub struct Artifact<'a, R: Serialize> {
    pub metadata: Metadata,
    pub config: &'a RunConfig,
    pub passed: bool,
    pub failures: &'a [String],
    pub report: &'a R,
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub command: String,
    pub version: &'static str,
}

/// Reads the thread cap from the environment.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} = {v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

/// Runs a command inside a pool capped at `threads` workers, or the default pool.
pub fn run_with_threads(
    command: Command,
    cfg: &RunConfig,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<Outcome, CliError> {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("{THREADS_ENV}: {e}")))?
            .install(|| run(command, cfg, out_dir)),
        None => run(command, cfg, out_dir),
    }
}
