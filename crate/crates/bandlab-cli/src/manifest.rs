//! Run manifests: configuration hash, per-sample seeds, timing, and the
//! output-file inventory.
//!
//! Identical configuration and base seed produce an identical
//! `configHash`, seed list, and numeric outputs; only the `timing` block
//! varies between reruns.

use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::output::write_json;

/// Tool identifier recorded in every manifest.
pub const TOOL: &str = concat!("bandlab-cli ", env!("CARGO_PKG_VERSION"));

/// Hex SHA-256 of the canonical configuration serialization (typed
/// struct, fixed field order), computed after all overrides are applied.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(config).expect("configuration serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct Timing {
    started_unix_ms: u128,
    elapsed_ms: u128,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct RunManifest<'a> {
    tool: &'static str,
    command: &'a str,
    config_hash: &'a str,
    base_seed: u64,
    /// Per-sample stream keys, `baseSeed ⊕ sampleIndex` in ascending
    /// sample order; empty for fully deterministic commands.
    seeds: &'a [u64],
    timing: Timing,
    files: &'a [String],
    config: &'a ExperimentConfig,
}

/// Writes `manifest.json` next to the run outputs.
pub fn write(
    dir: &Path,
    command: &str,
    config: &ExperimentConfig,
    hash: &str,
    seeds: &[u64],
    files: &[String],
    started: SystemTime,
    elapsed: Duration,
) -> Result<()> {
    let manifest = RunManifest {
        tool: TOOL,
        command,
        config_hash: hash,
        base_seed: config.run.base_seed,
        seeds,
        timing: Timing {
            started_unix_ms: started
                .duration_since(UNIX_EPOCH)
                .unwrap_or(Duration::ZERO)
                .as_millis(),
            elapsed_ms: elapsed.as_millis(),
        },
        files,
        config,
    };
    write_json(dir, "manifest.json", &manifest)?;
    Ok(())
}
