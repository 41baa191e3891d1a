// SPDX-License-Identifier: Apache-2.0

//! Run manifest: what was written, with content hashes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaVersions {
    pub manifest: u32,
    pub results: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_versions: SchemaVersions,
    pub tool: String,
    pub tool_version: String,
    pub config: serde_json::Value,
    pub artifacts: Vec<ArtifactEntry>,
    pub wall_clock_seconds: f64,
}

pub fn hash_file(path: &Path) -> Result<(String, u64), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

pub fn entries(root: &Path, files: &[String]) -> Result<Vec<ArtifactEntry>, CliError> {
    files
        .iter()
        .map(|name| {
            let (sha256, bytes) = hash_file(&root.join(name))?;
            Ok(ArtifactEntry {
                path: name.clone(),
                sha256,
                bytes,
            })
        })
        .collect()
}

impl RunManifest {
    pub fn write(&self, root: &Path) -> Result<(), CliError> {
        let path = root.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }

    pub fn read(root: &Path) -> Result<Self, CliError> {
        let path = root.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Manifest {
            path: path.clone(),
            reason: e.to_string(),
        })
    }

    /// Differences between the files on disk under `root` and this manifest.
    pub fn verify(&self, root: &Path) -> Vec<String> {
        let mut problems = Vec::new();
        for a in &self.artifacts {
            match hash_file(&root.join(&a.path)) {
                Ok((h, _)) if h == a.sha256 => {}
                Ok((h, _)) => problems.push(format!(
                    "{}: hash {h} differs from recorded {}",
                    a.path, a.sha256
                )),
                Err(e) => problems.push(format!("{}: {e}", a.path)),
            }
        }
        problems
    }
}

/// Differences between two artifact lists, by path.
pub fn compare(recorded: &[ArtifactEntry], fresh: &[ArtifactEntry]) -> Vec<String> {
    let mut problems = Vec::new();
    for a in recorded {
        match fresh.iter().find(|b| b.path == a.path) {
            None => problems.push(format!("{}: not produced by the re-run", a.path)),
            Some(b) if b.sha256 != a.sha256 => problems.push(format!(
                "{}: re-run hash {} differs from recorded {}",
                a.path, b.sha256, a.sha256
            )),
            Some(_) => {}
        }
    }
    for b in fresh
        .iter()
        .filter(|b| !recorded.iter().any(|a| a.path == b.path))
    {
        problems.push(format!(
            "{}: produced by the re-run but not recorded",
            b.path
        ));
    }
    problems
}
