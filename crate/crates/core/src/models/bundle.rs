//! Self-contained persisted model: preprocessing plus classifier.
//!
//! A bundle carries everything needed to score raw feature rows — the
//! fitted scaler, the optional PCA (its mask also spelled out as schema
//! names), the trained model, and the fingerprint of the feature schema it
//! was trained against. Loading against a different schema is refused.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureSchema;
use crate::matrix::Matrix;
use crate::pipeline::{PcaModel, PipelineError, Scaler};
use crate::scalar::Scalar;

use super::{ModelConfig, ModelError, TrainedModel};

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("schema fingerprint mismatch: model was trained on {expected}, data has {got}")]
    SchemaMismatch { expected: String, got: String },
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("model file {path}: {reason}")]
    Format { path: std::path::PathBuf, reason: String },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Persisted model with its preprocessing chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle<F> {
    pub schema_fingerprint: String,
    pub feature_names: Vec<String>,
    pub scaler: Scaler<F>,
    pub pca: Option<PcaModel<F>>,
    /// The PCA mask as schema names (mirrors `pca.mask`).
    pub pca_mask_names: Option<Vec<String>>,
    pub model: TrainedModel<F>,
    pub config: ModelConfig,
    pub seed: u64,
}

impl<F: Scalar> ModelBundle<F> {
    pub fn new(
        schema: &FeatureSchema,
        scaler: Scaler<F>,
        pca: Option<PcaModel<F>>,
        model: TrainedModel<F>,
        config: ModelConfig,
        seed: u64,
    ) -> Self {
        let names: Vec<String> = schema.names().map(str::to_string).collect();
        let pca_mask_names = pca.as_ref().map(|p| p.mask_names(&names));
        Self {
            schema_fingerprint: schema.fingerprint(),
            feature_names: names,
            scaler,
            pca,
            pca_mask_names,
            model,
            config,
            seed,
        }
    }

    /// Refuse feature spaces other than the one the model was trained on.
    pub fn check_schema(&self, schema: &FeatureSchema) -> Result<(), BundleError> {
        let got = schema.fingerprint();
        if got != self.schema_fingerprint {
            return Err(BundleError::SchemaMismatch {
                expected: self.schema_fingerprint.clone(),
                got,
            });
        }
        Ok(())
    }

    /// Scale, project (when fitted with PCA), and predict raw feature rows.
    pub fn predict_raw(&self, x: &Matrix<F>) -> Result<Vec<u8>, BundleError> {
        let scaled = self.scaler.apply(x)?;
        let input = match &self.pca {
            Some(pca) => pca.transform(&scaled)?,
            None => scaled,
        };
        Ok(self.model.predict(&input)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), BundleError> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| BundleError::Format { path: path.to_path_buf(), reason: e.to_string() })?;
        std::fs::write(path, json)
            .map_err(|source| BundleError::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: &Path) -> Result<Self, BundleError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| BundleError::Io { path: path.to_path_buf(), source })?;
        serde_json::from_str(&text)
            .map_err(|e| BundleError::Format { path: path.to_path_buf(), reason: e.to_string() })
    }
}
