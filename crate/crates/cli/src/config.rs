//! Run configuration: one JSON document, overridable by CLI flags.
//!
//! Unknown keys are rejected so a typo'd config fails loudly instead of
//! silently running defaults.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use rotorvib_core::analysis::{PcaTarget, ReportFormat, StudyConfig};
use rotorvib_core::features::FeatureConfig;
use rotorvib_core::synth::CorpusConfig;

use crate::CliError;

/// File locations; every command validates the subset it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub manifest: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

/// Train-time PCA request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcaSpec {
    pub target: PcaTarget,
    pub k: usize,
}

/// The whole run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub format: ReportFormat,
    /// Samples per window at extraction time.
    pub window_size: usize,
    pub paths: PathsConfig,
    pub corpus: CorpusConfig<f64>,
    pub features: FeatureConfig,
    pub study: StudyConfig,
    pub pca: Option<PcaSpec>,
    /// Restrict the feature space to one family before training/evaluating.
    pub family: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            format: ReportFormat::Json,
            window_size: rotorvib_core::ingest::DEFAULT_WINDOW_SIZE,
            paths: PathsConfig::default(),
            corpus: CorpusConfig::default(),
            features: FeatureConfig::default(),
            study: StudyConfig::default(),
            pca: None,
            family: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &PathBuf) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// Resolve a path: explicit flag wins, then config, then an error
    /// naming the missing input.
    pub fn require_path(
        flag: Option<PathBuf>,
        configured: &Option<PathBuf>,
        what: &str,
    ) -> Result<PathBuf, CliError> {
        flag.or_else(|| configured.clone())
            .ok_or_else(|| CliError::Config(format!("missing {what} (flag or config.paths)")))
    }

    /// Default schema sidecar location for a matrix file:
    /// `features.csv -> features.schema.json`.
    pub fn schema_sidecar(matrix: &PathBuf) -> PathBuf {
        let stem = matrix.file_stem().and_then(|s| s.to_str()).unwrap_or("features");
        matrix.with_file_name(format!("{stem}.schema.json"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_sane() {
        let config = RunConfig::default();
        assert_eq!(config.seed, 42);
        assert_eq!(config.study.train_fraction, 0.7);
        assert_eq!(config.corpus.duration_s, 60.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"sed": 1}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn sidecar_naming() {
        let m = PathBuf::from("/tmp/x/features.csv");
        assert_eq!(RunConfig::schema_sidecar(&m), PathBuf::from("/tmp/x/features.schema.json"));
    }
}
