//! Random forest: bagged CART trees with per-split feature subsampling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::seed;

use super::tree::{DecisionTree, TreeConfig};
use super::ModelError;

/// Forest training parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features considered per split; `None` means `floor(sqrt(F))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub tree: TreeConfig,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self { n_trees: 100, max_features: None, bootstrap: true, tree: TreeConfig::default() }
    }
}

/// Majority-vote ensemble of decision trees. Prediction ties go to class 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest<F> {
    trees: Vec<DecisionTree<F>>,
    n_features: usize,
    seed: u64,
}

impl<F: Scalar> RandomForest<F> {
    /// Train `n_trees` trees, each on a bootstrap sample (n draws with
    /// replacement) considering `max_features` random features per split.
    ///
    /// Per-tree seeds derive deterministically from `master_seed`, so the
    /// forest is identical however tree training is scheduled.
    pub fn fit(
        x: &Matrix<F>,
        y: &[u8],
        config: &ForestConfig,
        master_seed: u64,
    ) -> Result<Self, ModelError> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(ModelError::EmptyTrainSet);
        }
        assert!(config.n_trees >= 1, "forest needs at least one tree");
        let n = x.rows();
        let mtry = config
            .max_features
            .unwrap_or_else(|| (x.cols() as f64).sqrt().floor() as usize)
            .clamp(1, x.cols());

        let trees: Result<Vec<DecisionTree<F>>, ModelError> = (0..config.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, t as u64));
                let rows: Vec<usize> = if config.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                let mtry = if mtry == x.cols() { None } else { Some(mtry) };
                DecisionTree::fit_on_rows(x, y, &rows, &config.tree, mtry, Some(rng))
            })
            .collect();
        Ok(Self { trees: trees?, n_features: x.cols(), seed: master_seed })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn trees(&self) -> &[DecisionTree<F>] {
        &self.trees
    }

    pub fn predict_row(&self, row: &[F]) -> u8 {
        let votes_defective = self.trees.iter().filter(|t| t.predict_row(row) == 1).count();
        // Strict majority for class 1; ties resolve to class 0 (normal).
        if 2 * votes_defective > self.trees.len() {
            1
        } else {
            0
        }
    }

    pub fn predict(&self, x: &Matrix<F>) -> Vec<u8> {
        (0..x.rows())
            .into_par_iter()
            .map(|i| self.predict_row(x.row(i)))
            .collect()
    }

    /// Mean of per-tree normalized importances, renormalized to sum 1.
    /// All zeros when no tree ever split.
    pub fn importances(&self) -> Vec<F> {
        let mut acc = vec![F::zero(); self.n_features];
        for tree in &self.trees {
            for (a, v) in acc.iter_mut().zip(tree.importances()) {
                *a += v;
            }
        }
        let total: F = acc.iter().copied().sum();
        if total <= F::zero() {
            return acc;
        }
        acc.iter().map(|&v| v / total).collect()
    }
}
