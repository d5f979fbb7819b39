//! Run manifest: every artifact a run wrote, with content digests, plus the
//! fully resolved config that produced it.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub status: &'a str,
    pub config: &'a RunConfig,
    pub outputs: &'a [ManifestEntry],
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Write `manifest.json` into the output directory.
pub fn write_manifest(
    dir: &Path,
    config: &RunConfig,
    status: &str,
    outputs: &mut Vec<ManifestEntry>,
) -> Result<(), CliError> {
    outputs.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = Manifest {
        status,
        config,
        outputs,
    };
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Data(format!("manifest serialization: {e}")))?;
    text.push('\n');
    std::fs::write(dir.join("manifest.json"), text)
        .map_err(|e| CliError::Data(format!("cannot write manifest: {e}")))?;
    Ok(())
}
