//! Experiment configuration: JSON schema, dotted-path overrides, and
//! validation with field-path diagnostics.
//!
//! The configuration is a single JSON document with four blocks:
//!
//! ```json
//! {
//!   "model":    { "d": 1, "L": 256, "W": 16,
//!                 "profile": { "kind": "gaussian-density", "scale": 1.0 },
//!                 "dist": { "kind": "complex-gaussian-circular" } },
//!   "spectral": { "E": [0.0], "eta": [0.2, 0.4], "kappa": 0.2, "gamma": 0.1 },
//!   "run":      { "samples": 64, "baseSeed": 12345, "threads": 1 },
//!   "outputs":  { "directory": "out", "formats": ["csv", "json"] }
//! }
//! ```
//!
//! All physical parameters are explicit — there are no defaults for `L`,
//! `W`, or `d`. Unknown keys are rejected so typos cannot silently fall
//! back to anything.

use std::fmt;
use std::fs;
use std::path::Path;

use bandlab::{DistributionSpec, ProfileSpec};
use serde::{Deserialize, Serialize};

/// A configuration problem tied to the dotted path of the offending field.
#[derive(Debug, Clone)]
pub struct ConfigError {
    /// Dotted field path, e.g. `spectral.eta` or `model.W`.
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error at {}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// The ensemble: torus geometry, band width, profile shape, entry law.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    /// Torus dimension (1, 2, or 3).
    pub d: usize,
    /// Side length; the matrix size is `N = L^d`.
    #[serde(rename = "L")]
    pub side: usize,
    /// Band width, `1 ≤ W ≤ L`.
    #[serde(rename = "W")]
    pub w: usize,
    /// Variance-profile shape and scale.
    pub profile: ProfileSpec,
    /// Off-diagonal entry distribution.
    pub dist: DistributionSpec,
}

/// The spectral-domain grid the experiment walks over.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralBlock {
    /// Energies `E` (real parts of `z`).
    #[serde(rename = "E")]
    pub energies: Vec<f64>,
    /// Spectral distances `η > 0` (imaginary parts of `z`).
    pub eta: Vec<f64>,
    /// Bulk margin: the bulk window is `[−2+κ, 2−κ]`.
    pub kappa: f64,
    /// Lower-edge exponent for admissible `η` (recorded in outputs; runs
    /// outside the admissible window warn rather than fail).
    pub gamma: f64,
}

/// Monte-Carlo bookkeeping.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct RunBlock {
    /// Number of matrix samples.
    pub samples: usize,
    /// Base seed; sample `k` uses the stream keyed by `baseSeed ⊕ k`.
    pub base_seed: u64,
    /// Worker threads; results are identical for any value.
    pub threads: usize,
}

/// Output destination and formats.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsBlock {
    /// Output directory (created if missing); `--out` overrides it.
    pub directory: String,
    /// Any non-empty subset of `{"csv", "json"}`.
    pub formats: Vec<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// The full experiment description; hashing this (serialized with the
/// field order below) yields the manifest's configuration hash.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelBlock,
    pub spectral: SpectralBlock,
    pub run: RunBlock,
    pub outputs: OutputsBlock,
}

impl ExperimentConfig {
    /// Checks every block invariant, reporting the dotted path of the
    /// first violated field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = &self.model;
        if !(1..=3).contains(&m.d) {
            return Err(ConfigError::new("model.d", "dimension must be 1, 2, or 3"));
        }
        if m.side == 0 {
            return Err(ConfigError::new("model.L", "side length must be positive"));
        }
        if m.w == 0 || m.w > m.side {
            return Err(ConfigError::new(
                "model.W",
                format!("band width must satisfy 1 ≤ W ≤ L = {}", m.side),
            ));
        }
        if let Err(e) = m.profile.validate() {
            return Err(ConfigError::new("model.profile", e.to_string()));
        }
        if let Err(e) = m.dist.validate() {
            return Err(ConfigError::new("model.dist", e.to_string()));
        }

        let s = &self.spectral;
        if s.energies.is_empty() {
            return Err(ConfigError::new("spectral.E", "energy list must not be empty"));
        }
        for (i, e) in s.energies.iter().enumerate() {
            if !e.is_finite() {
                return Err(ConfigError::new(
                    format!("spectral.E[{i}]"),
                    "energies must be finite",
                ));
            }
        }
        if s.eta.is_empty() {
            return Err(ConfigError::new("spectral.eta", "eta list must not be empty"));
        }
        for (i, eta) in s.eta.iter().enumerate() {
            if !(eta.is_finite() && *eta > 0.0) {
                return Err(ConfigError::new(
                    format!("spectral.eta[{i}]"),
                    "eta values must be positive",
                ));
            }
        }
        if !(0.0..2.0).contains(&s.kappa) {
            return Err(ConfigError::new(
                "spectral.kappa",
                "bulk margin must lie in [0, 2)",
            ));
        }
        if !(s.gamma.is_finite() && s.gamma > 0.0) {
            return Err(ConfigError::new("spectral.gamma", "gamma must be positive"));
        }

        let r = &self.run;
        if r.samples == 0 {
            return Err(ConfigError::new("run.samples", "need at least one sample"));
        }
        if r.threads == 0 {
            return Err(ConfigError::new("run.threads", "need at least one thread"));
        }

        let o = &self.outputs;
        if o.directory.is_empty() {
            return Err(ConfigError::new(
                "outputs.directory",
                "output directory must not be empty",
            ));
        }
        if o.formats.is_empty() {
            return Err(ConfigError::new(
                "outputs.formats",
                "choose at least one of \"csv\", \"json\"",
            ));
        }
        Ok(())
    }

    pub fn wants_csv(&self) -> bool {
        self.outputs.formats.contains(&OutputFormat::Csv)
    }

    pub fn wants_json(&self) -> bool {
        self.outputs.formats.contains(&OutputFormat::Json)
    }
}

/// One dotted-path override, e.g. `run.samples = 32`.
#[derive(Debug, Clone)]
pub struct Override {
    pub path: String,
    pub value: serde_json::Value,
}

impl Override {
    /// Parses a `KEY=VALUE` argument. The value is interpreted as JSON
    /// when possible (numbers, lists, objects, quoted strings) and as a
    /// bare string otherwise, so `--override run.samples=32` and
    /// `--override model.profile.kind=exponential-decay` both work.
    pub fn parse(arg: &str) -> Result<Self, ConfigError> {
        let (path, raw) = arg.split_once('=').ok_or_else(|| {
            ConfigError::new("--override", format!("expected KEY=VALUE, got `{arg}`"))
        })?;
        if path.is_empty() {
            return Err(ConfigError::new("--override", "empty field path"));
        }
        let value = serde_json::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        Ok(Override {
            path: path.to_string(),
            value,
        })
    }

    /// An override carrying an already-typed value (used for the
    /// dedicated `--seed`, `--threads`, `--out` flags).
    pub fn typed(path: &str, value: serde_json::Value) -> Self {
        Override {
            path: path.to_string(),
            value,
        }
    }
}

/// Sets `value` at the dotted `path` inside a JSON tree, creating
/// intermediate objects as needed. Paths address whole fields; lists are
/// replaced wholesale, not element-wise.
fn apply_override(tree: &mut serde_json::Value, ov: &Override) -> Result<(), ConfigError> {
    let mut cursor = tree;
    let segments: Vec<&str> = ov.path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let map = cursor.as_object_mut().ok_or_else(|| {
            ConfigError::new(
                segments[..i].join("."),
                "cannot descend into a non-object value",
            )
        })?;
        if i + 1 == segments.len() {
            map.insert(seg.to_string(), ov.value.clone());
            return Ok(());
        }
        cursor = map
            .entry(seg.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("override paths are non-empty");
}

/// Loads, overrides, deserializes, and validates a configuration file.
pub fn load(path: &Path, overrides: &[Override]) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| {
        ConfigError::new("config", format!("cannot read {}: {e}", path.display()))
    })?;
    from_text(&text, overrides)
}

/// Same as [`load`] for an in-memory document (exposed for tests).
pub fn from_text(text: &str, overrides: &[Override]) -> Result<ExperimentConfig, ConfigError> {
    let mut tree: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| ConfigError::new("config", format!("invalid JSON: {e}")))?;
    for ov in overrides {
        apply_override(&mut tree, ov)?;
    }
    let config: ExperimentConfig = serde_json::from_value(tree)
        .map_err(|e| ConfigError::new("config", e.to_string()))?;
    config.validate()?;
    Ok(config)
}
