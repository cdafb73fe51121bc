//! CART decision tree with Gini impurity.
//!
//! At each node the builder scans every candidate feature and every
//! midpoint between consecutive distinct sorted values, choosing the split
//! with the lowest weighted Gini impurity; ties resolve to the lowest
//! feature index, then the lowest threshold. Nodes split only while the
//! impurity strictly decreases, so every internal node's split is a real
//! improvement.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::ModelError;

/// Tree growth limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TreeConfig {
    /// `None` grows until purity or exhaustion.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self { max_depth: None, min_samples_split: 2 }
    }
}

/// Tree node. Internal nodes keep their routed sample statistics so
/// importances can be recomputed by traversal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node<F> {
    Leaf {
        class: u8,
        /// Training rows of each class routed to this leaf.
        counts: [usize; 2],
    },
    Internal {
        feature: usize,
        threshold: F,
        /// Training rows routed through this node, per class.
        counts: [usize; 2],
        /// Gini impurity of those rows.
        impurity: F,
        /// Weighted impurity after the split.
        child_impurity: F,
        left: Box<Node<F>>,
        right: Box<Node<F>>,
    },
}

impl<F: Scalar> Node<F> {
    fn route(&self, row: &[F]) -> u8 {
        match self {
            Node::Leaf { class, .. } => *class,
            Node::Internal { feature, threshold, left, right, .. } => {
                if row[*feature] <= *threshold {
                    left.route(row)
                } else {
                    right.route(row)
                }
            }
        }
    }
}

/// Gini impurity from binary class counts: `1 - p0^2 - p1^2`.
pub fn gini_impurity<F: Scalar>(counts: [usize; 2]) -> F {
    let n = counts[0] + counts[1];
    if n == 0 {
        return F::zero();
    }
    let n = F::of_usize(n);
    let p0 = F::of_usize(counts[0]) / n;
    let p1 = F::of_usize(counts[1]) / n;
    F::one() - p0 * p0 - p1 * p1
}

/// Best split of the rows, if any strictly decreases impurity.
#[derive(Debug, Clone, Copy)]
struct BestSplit<F> {
    feature: usize,
    threshold: F,
    weighted_impurity: F,
}

/// Scan `features` (ascending) for the split minimizing weighted Gini.
fn find_best_split<F: Scalar>(
    x: &Matrix<F>,
    y: &[u8],
    rows: &[usize],
    features: &[usize],
    parent_impurity: F,
) -> Option<BestSplit<F>> {
    let n = rows.len();
    let n_f = F::of_usize(n);
    let total = [
        rows.iter().filter(|&&i| y[i] == 0).count(),
        rows.iter().filter(|&&i| y[i] == 1).count(),
    ];

    let mut best: Option<BestSplit<F>> = None;
    let mut sorted: Vec<(F, u8)> = Vec::with_capacity(n);
    for &feature in features {
        sorted.clear();
        sorted.extend(rows.iter().map(|&i| (x.get(i, feature), y[i])));
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        let mut left = [0usize; 2];
        for w in 0..n - 1 {
            let (value, label) = sorted[w];
            left[label as usize] += 1;
            let next = sorted[w + 1].0;
            if next == value {
                continue;
            }
            let threshold = (value + next) / F::of(2.0);
            // Degenerate midpoints (adjacent floats) cannot separate.
            if !(threshold >= value && threshold < next) {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let n_left = F::of_usize(left[0] + left[1]);
            let n_right = F::of_usize(right[0] + right[1]);
            let weighted = (n_left / n_f) * gini_impurity::<F>(left)
                + (n_right / n_f) * gini_impurity::<F>(right);
            let better = match &best {
                None => weighted < parent_impurity,
                Some(b) => weighted < b.weighted_impurity,
            };
            if better {
                best = Some(BestSplit { feature, threshold, weighted_impurity: weighted });
            }
        }
    }
    best
}

/// Greedy CART classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree<F> {
    root: Node<F>,
    n_features: usize,
    n_train: usize,
    /// Per-feature accumulated (node weight x impurity decrease).
    importance_acc: Vec<F>,
}

struct Builder<'a, F> {
    x: &'a Matrix<F>,
    y: &'a [u8],
    config: &'a TreeConfig,
    n_train: usize,
    importance_acc: Vec<F>,
    /// Features considered per split; `None` means all.
    mtry: Option<usize>,
    rng: Option<ChaCha8Rng>,
}

impl<F: Scalar> Builder<'_, F> {
    fn candidate_features(&mut self) -> Vec<usize> {
        let all = self.x.cols();
        match (self.mtry, &mut self.rng) {
            (Some(m), Some(rng)) if m < all => {
                let mut indices: Vec<usize> = (0..all).collect();
                indices.shuffle(rng);
                let mut chosen = indices[..m].to_vec();
                // Ascending order keeps the tie-break on feature index.
                chosen.sort_unstable();
                chosen
            }
            _ => (0..all).collect(),
        }
    }

    fn build(&mut self, rows: &[usize], depth: usize) -> Node<F> {
        let counts = [
            rows.iter().filter(|&&i| self.y[i] == 0).count(),
            rows.iter().filter(|&&i| self.y[i] == 1).count(),
        ];
        let impurity = gini_impurity::<F>(counts);
        let majority = if counts[1] > counts[0] { 1 } else { 0 };
        let leaf = Node::Leaf { class: majority, counts };

        if counts[0] == 0 || counts[1] == 0 || rows.len() < self.config.min_samples_split {
            return leaf;
        }
        if let Some(max) = self.config.max_depth {
            if depth >= max {
                return leaf;
            }
        }
        let features = self.candidate_features();
        let Some(split) = find_best_split(self.x, self.y, rows, &features, impurity) else {
            return leaf;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| self.x.get(i, split.feature) <= split.threshold);
        debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());

        let weight = F::of_usize(rows.len()) / F::of_usize(self.n_train);
        self.importance_acc[split.feature] += weight * (impurity - split.weighted_impurity);

        let left = self.build(&left_rows, depth + 1);
        let right = self.build(&right_rows, depth + 1);
        Node::Internal {
            feature: split.feature,
            threshold: split.threshold,
            counts,
            impurity,
            child_impurity: split.weighted_impurity,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

impl<F: Scalar> DecisionTree<F> {
    pub fn fit(x: &Matrix<F>, y: &[u8], config: &TreeConfig) -> Result<Self, ModelError> {
        let rows: Vec<usize> = (0..x.rows()).collect();
        Self::fit_on_rows(x, y, &rows, config, None, None)
    }

    /// Fit on a row subset, optionally sampling `mtry` features per split
    /// (random forest trees use this).
    pub(crate) fn fit_on_rows(
        x: &Matrix<F>,
        y: &[u8],
        rows: &[usize],
        config: &TreeConfig,
        mtry: Option<usize>,
        rng: Option<ChaCha8Rng>,
    ) -> Result<Self, ModelError> {
        if rows.is_empty() || x.cols() == 0 {
            return Err(ModelError::EmptyTrainSet);
        }
        assert_eq!(x.rows(), y.len());
        let mut builder = Builder {
            x,
            y,
            config,
            n_train: rows.len(),
            importance_acc: vec![F::zero(); x.cols()],
            mtry,
            rng,
        };
        let root = builder.build(rows, 0);
        Ok(Self {
            root,
            n_features: x.cols(),
            n_train: rows.len(),
            importance_acc: builder.importance_acc,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn root(&self) -> &Node<F> {
        &self.root
    }

    pub fn predict_row(&self, row: &[F]) -> u8 {
        self.root.route(row)
    }

    pub fn predict(&self, x: &Matrix<F>) -> Vec<u8> {
        x.iter_rows().map(|row| self.root.route(row)).collect()
    }

    /// Raw accumulated importances (not normalized).
    pub fn importance_accumulator(&self) -> &[F] {
        &self.importance_acc
    }

    /// Importances normalized to sum 1; all zeros when the tree never split.
    pub fn importances(&self) -> Vec<F> {
        let total: F = self.importance_acc.iter().copied().sum();
        if total <= F::zero() {
            return vec![F::zero(); self.importance_acc.len()];
        }
        self.importance_acc.iter().map(|&v| v / total).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_pair_single_split() {
        let x = Matrix::from_rows(vec![vec![0.0], vec![1.0]]);
        let y = vec![0u8, 1];
        let tree = DecisionTree::fit(&x, &y, &TreeConfig::default()).unwrap();
        assert_eq!(tree.predict(&x), y);
        match tree.root() {
            Node::Internal { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 0.5);
            }
            Node::Leaf { .. } => panic!("expected a split"),
        }
        assert_eq!(tree.importances(), vec![1.0]);
    }

    #[test]
    fn identical_rows_mixed_labels_become_majority_leaf() {
        let x = Matrix::from_rows(vec![vec![2.0, 2.0]; 5]);
        let y = vec![1, 1, 1, 0, 0];
        let tree = DecisionTree::fit(&x, &y, &TreeConfig::default()).unwrap();
        match tree.root() {
            Node::Leaf { class, counts } => {
                assert_eq!(*class, 1);
                assert_eq!(*counts, [2, 3]);
            }
            Node::Internal { .. } => panic!("no valid split exists"),
        }
        assert_eq!(tree.importances(), vec![0.0, 0.0]);
    }

    #[test]
    fn majority_tie_resolves_to_class_zero() {
        let x = Matrix::from_rows(vec![vec![1.0]; 4]);
        let y = vec![0, 1, 0, 1];
        let tree = DecisionTree::fit(&x, &y, &TreeConfig::default()).unwrap();
        assert_eq!(tree.predict_row(&[1.0]), 0);
    }

    #[test]
    fn consistent_data_reaches_perfect_train_accuracy() {
        // No two identical rows carry different labels.
        let x = Matrix::from_rows(vec![
            vec![0.1, 3.0],
            vec![0.4, 2.0],
            vec![0.2, -1.0],
            vec![0.9, 2.5],
            vec![0.8, -0.5],
            vec![0.7, 0.0],
        ]);
        let y = vec![0, 0, 1, 1, 1, 0];
        let tree = DecisionTree::fit(&x, &y, &TreeConfig::default()).unwrap();
        assert_eq!(tree.predict(&x), y);
        let sum: f64 = tree.importances().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn max_depth_caps_growth() {
        let x = Matrix::from_rows((0..8).map(|i| vec![i as f64]).collect());
        let y = vec![0, 1, 0, 1, 0, 1, 0, 1];
        let tree =
            DecisionTree::fit(&x, &y, &TreeConfig { max_depth: Some(1), min_samples_split: 2 }).unwrap();
        match tree.root() {
            Node::Internal { left, right, .. } => {
                assert!(matches!(**left, Node::Leaf { .. }));
                assert!(matches!(**right, Node::Leaf { .. }));
            }
            Node::Leaf { .. } => panic!("depth-1 tree should split once"),
        }
    }

    #[test]
    fn empty_train_set_rejected() {
        let x: Matrix<f64> = Matrix::zeros(0, 2);
        assert!(matches!(
            DecisionTree::fit(&x, &[], &TreeConfig::default()),
            Err(ModelError::EmptyTrainSet)
        ));
    }
}
