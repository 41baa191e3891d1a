// SPDX-License-Identifier: Apache-2.0

//! Config-driven experiment runner.
//!
//! Exit codes are a stable contract: 0 success, 1 config error,
//! 2 runtime or capacity error, 3 I/O error.

pub mod catalog;
pub mod config;
pub mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chronolab::disorder_lab::{RunOptions, SCHEMA_VERSION};

use crate::catalog::Artifacts;
use crate::config::{ConfigErrors, ExperimentConfig};
use crate::manifest::{compare, entries, RunManifest, SchemaVersions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigErrors),

    #[error("{experiment}: {source}")]
    Run {
        experiment: &'static str,
        #[source]
        source: chronolab::Error,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unreadable manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },

    #[error("check failed:\n  {}", .0.join("\n  "))]
    Check(Vec<String>),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use chronolab::Error as E;
        match self {
            Self::Config(_) => 1,
            Self::Run { source, .. } => match source {
                E::Parameter(_) => 1,
                E::Io { .. } | E::Format { .. } | E::SchemaVersion { .. } => 3,
                _ => 2,
            },
            Self::Io { .. } | Self::Manifest { .. } => 3,
            Self::Check(_) => 2,
        }
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(config::validate_config(&text)?)
}

fn run_into(
    config: &ExperimentConfig,
    root: &Path,
    workers: usize,
) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
    let mut out = Artifacts::new(root);
    let options = RunOptions {
        workers,
        execution_order: None,
    };
    let exp = config.experiment;
    if exp == catalog::Experiment::YaoPhaseDiagram {
        let cells = root.join("cells");
        fs::create_dir_all(&cells).map_err(|e| CliError::io(&cells, e))?;
    }
    exp.run(config, &mut out, &options)
        .map_err(|source| CliError::Run {
            experiment: exp.name(),
            source,
        })?;
    Ok(out.written().to_vec())
}

/// Run the experiment into `config.output` and write the manifest there.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let root = &config.output;
    let files = run_into(config, root, workers)?;
    let manifest = RunManifest {
        schema_versions: SchemaVersions {
            manifest: manifest::MANIFEST_SCHEMA_VERSION,
            results: SCHEMA_VERSION,
        },
        tool: env!("CARGO_PKG_NAME").to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.echo(),
        artifacts: entries(root, &files)?,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    manifest.write(root)?;
    Ok(manifest)
}

/// Verify the files recorded in `config.output` against their hashes, then
/// re-run the experiment in a scratch directory and compare the results.
pub fn check_experiment(
    config: &ExperimentConfig,
    workers: usize,
) -> Result<RunManifest, CliError> {
    let root = &config.output;
    let recorded = RunManifest::read(root)?;
    let mut problems = recorded.verify(root);
    let scratch = tempfile::tempdir().map_err(|e| CliError::io(&std::env::temp_dir(), e))?;
    let files = run_into(config, scratch.path(), workers)?;
    problems.extend(compare(
        &recorded.artifacts,
        &entries(scratch.path(), &files)?,
    ));
    if problems.is_empty() {
        Ok(recorded)
    } else {
        Err(CliError::Check(problems))
    }
}
