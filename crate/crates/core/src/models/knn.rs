//! Brute-force k-nearest neighbors with documented tie-breaks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KnnConfig {
    pub k: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self { k: 5 }
    }
}

/// Stored training matrix plus labels; prediction is an exhaustive
/// Euclidean scan.
///
/// Tie-breaks: equal distances order by lower training-row index; a tied
/// vote resolves to the label of the single nearest neighbor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel<F> {
    x: Matrix<F>,
    y: Vec<u8>,
    k: usize,
}

impl<F: Scalar> KnnModel<F> {
    pub fn new(x: Matrix<F>, y: Vec<u8>, k: usize) -> Result<Self, ModelError> {
        if x.rows() == 0 {
            return Err(ModelError::EmptyTrainSet);
        }
        if k == 0 || k > x.rows() {
            return Err(ModelError::InvalidK { k, rows: x.rows() });
        }
        assert_eq!(x.rows(), y.len());
        Ok(Self { x, y, k })
    }

    pub fn n_features(&self) -> usize {
        self.x.cols()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn squared_distance(a: &[F], b: &[F]) -> F {
        let mut acc = F::zero();
        for (&u, &v) in a.iter().zip(b) {
            let d = u - v;
            acc += d * d;
        }
        acc
    }

    pub fn predict_row(&self, row: &[F]) -> u8 {
        let mut neighbors: Vec<(F, usize)> = (0..self.x.rows())
            .map(|i| (Self::squared_distance(self.x.row(i), row), i))
            .collect();
        neighbors.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        let top = &neighbors[..self.k];
        let defective = top.iter().filter(|(_, i)| self.y[*i] == 1).count();
        let normal = self.k - defective;
        if defective > normal {
            1
        } else if normal > defective {
            0
        } else {
            self.y[top[0].1]
        }
    }

    pub fn predict(&self, x: &Matrix<F>) -> Vec<u8> {
        (0..x.rows())
            .into_par_iter()
            .map(|i| self.predict_row(x.row(i)))
            .collect()
    }
}
