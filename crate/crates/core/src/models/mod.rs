//! The four classifiers: decision tree, random forest, k-nearest
//! neighbors, and support vector machine.
//!
//! All are native implementations over binary labels (0 = normal,
//! 1 = defective). Trained models are immutable, serializable to JSON, and
//! safe to share across threads for prediction. Training never reads
//! labels outside the rows it is given.

pub mod bundle;
pub mod forest;
pub mod knn;
pub mod svm;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub use bundle::{BundleError, ModelBundle};
pub use forest::{ForestConfig, RandomForest};
pub use knn::{KnnConfig, KnnModel};
pub use svm::{KernelSpec, SvmConfig, SvmModel};
pub use tree::{DecisionTree, Node, TreeConfig};

/// Model training or prediction failure.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("training set is empty")]
    EmptyTrainSet,
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("prediction and label lengths differ: {predictions} vs {labels}")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("no predictions to score")]
    Empty,
    #[error("model has no feature importances (not tree-based)")]
    NotTreeBased,
    #[error("k = {k} must lie in [1, {rows}]")]
    InvalidK { k: usize, rows: usize },
    #[error("row width {got} does not match the model's {expected} features")]
    WidthMismatch { expected: usize, got: usize },
}

/// Which classifier to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    DecisionTree,
    RandomForest,
    Knn,
    Svm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::Svm, Algorithm::DecisionTree, Algorithm::RandomForest, Algorithm::Knn];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::DecisionTree => "decision_tree",
            Algorithm::RandomForest => "random_forest",
            Algorithm::Knn => "knn",
            Algorithm::Svm => "svm",
        }
    }

    pub fn is_tree_based(self) -> bool {
        matches!(self, Algorithm::DecisionTree | Algorithm::RandomForest)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "dt" | "decision_tree" | "tree" => Ok(Algorithm::DecisionTree),
            "rf" | "random_forest" | "forest" => Ok(Algorithm::RandomForest),
            "knn" => Ok(Algorithm::Knn),
            "svm" => Ok(Algorithm::Svm),
            other => Err(format!("unknown algorithm '{other}'")),
        }
    }
}

/// Hyperparameters for every algorithm; only the section matching
/// `algorithm` is consulted at training time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub algorithm: Algorithm,
    pub tree: TreeConfig,
    pub forest: ForestConfig,
    pub knn: KnnConfig,
    pub svm: SvmConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::RandomForest,
            tree: TreeConfig::default(),
            forest: ForestConfig::default(),
            knn: KnnConfig::default(),
            svm: SvmConfig::default(),
        }
    }
}

impl ModelConfig {
    pub fn for_algorithm(algorithm: Algorithm) -> Self {
        Self { algorithm, ..Self::default() }
    }
}

/// A trained classifier of any of the four kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TrainedModel<F> {
    DecisionTree(DecisionTree<F>),
    RandomForest(RandomForest<F>),
    Knn(KnnModel<F>),
    Svm(SvmModel<F>),
}

impl<F: Scalar> TrainedModel<F> {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            TrainedModel::DecisionTree(_) => Algorithm::DecisionTree,
            TrainedModel::RandomForest(_) => Algorithm::RandomForest,
            TrainedModel::Knn(_) => Algorithm::Knn,
            TrainedModel::Svm(_) => Algorithm::Svm,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::DecisionTree(m) => m.n_features(),
            TrainedModel::RandomForest(m) => m.n_features(),
            TrainedModel::Knn(m) => m.n_features(),
            TrainedModel::Svm(m) => m.n_features(),
        }
    }

    pub fn predict(&self, x: &Matrix<F>) -> Result<Vec<u8>, ModelError> {
        if x.cols() != self.n_features() {
            return Err(ModelError::WidthMismatch { expected: self.n_features(), got: x.cols() });
        }
        Ok(match self {
            TrainedModel::DecisionTree(m) => m.predict(x),
            TrainedModel::RandomForest(m) => m.predict(x),
            TrainedModel::Knn(m) => m.predict(x),
            TrainedModel::Svm(m) => m.predict(x),
        })
    }

    /// Normalized Gini importances; errors for kNN and SVM.
    pub fn gini_importance(&self) -> Result<Vec<F>, ModelError> {
        match self {
            TrainedModel::DecisionTree(m) => Ok(m.importances()),
            TrainedModel::RandomForest(m) => Ok(m.importances()),
            _ => Err(ModelError::NotTreeBased),
        }
    }
}

/// Train the classifier selected by `config.algorithm`.
pub fn train_model<F: Scalar>(
    x: &Matrix<F>,
    y: &[u8],
    config: &ModelConfig,
    seed: u64,
) -> Result<TrainedModel<F>, ModelError> {
    Ok(match config.algorithm {
        Algorithm::DecisionTree => TrainedModel::DecisionTree(DecisionTree::fit(x, y, &config.tree)?),
        Algorithm::RandomForest => {
            TrainedModel::RandomForest(RandomForest::fit(x, y, &config.forest, seed)?)
        }
        Algorithm::Knn => TrainedModel::Knn(KnnModel::new(x.clone(), y.to_vec(), config.knn.k)?),
        Algorithm::Svm => TrainedModel::Svm(SvmModel::fit(x, y, &config.svm, seed)?),
    })
}

/// Fraction of predictions equal to the labels.
pub fn accuracy(predictions: &[u8], labels: &[u8]) -> Result<f64, ModelError> {
    if predictions.len() != labels.len() {
        return Err(ModelError::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(ModelError::Empty);
    }
    let correct = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(correct as f64 / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_known_values() {
        assert_eq!(accuracy(&[1, 1, 0], &[1, 1, 0]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 0], &[1, 1]).unwrap(), 0.5);
        assert!(matches!(accuracy(&[], &[]), Err(ModelError::Empty)));
        assert!(matches!(
            accuracy(&[1], &[1, 0]),
            Err(ModelError::LengthMismatch { predictions: 1, labels: 2 })
        ));
    }

    #[test]
    fn majority_baseline_on_paper_shaped_labels() {
        let mut labels = vec![0u8; 480];
        labels.extend(vec![1u8; 1080]);
        let predictions = vec![1u8; 1560];
        let acc = accuracy(&predictions, &labels).unwrap();
        assert!((acc - 1080.0 / 1560.0).abs() < 1e-12);
        assert!((acc - 0.6923).abs() < 1e-4);
    }

    #[test]
    fn algorithm_parsing() {
        assert_eq!("rf".parse::<Algorithm>().unwrap(), Algorithm::RandomForest);
        assert_eq!("decision-tree".parse::<Algorithm>().unwrap(), Algorithm::DecisionTree);
        assert!("mlp".parse::<Algorithm>().is_err());
    }
}
