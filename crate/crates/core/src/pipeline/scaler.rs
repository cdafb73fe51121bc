//! Per-feature standardization fitted on training rows only.

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::PipelineError;

/// Column means and population standard deviations of the training matrix.
///
/// Columns with zero variance are passed through centered-only: their
/// stored std is 0 and no division happens on apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler<F> {
    pub means: Vec<F>,
    pub stds: Vec<F>,
}

impl<F: Scalar> Scaler<F> {
    /// Fit on the training matrix. The resulting parameters depend on
    /// nothing but these rows.
    pub fn fit(train: &Matrix<F>) -> Result<Self, PipelineError> {
        if train.rows() == 0 || train.cols() == 0 {
            return Err(PipelineError::EmptyMatrix);
        }
        let n = F::of_usize(train.rows());
        let mut means = vec![F::zero(); train.cols()];
        for row in train.iter_rows() {
            for (m, &v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m = *m / n;
        }
        let mut vars = vec![F::zero(); train.cols()];
        for row in train.iter_rows() {
            for ((var, &m), &v) in vars.iter_mut().zip(&means).zip(row) {
                let d = v - m;
                *var += d * d;
            }
        }
        let stds = vars.into_iter().map(|v| (v / n).sqrt()).collect();
        Ok(Self { means, stds })
    }

    /// Standardize a matrix with the fitted parameters. The same parameters
    /// transform training and test data alike.
    pub fn apply(&self, m: &Matrix<F>) -> Result<Matrix<F>, PipelineError> {
        if m.cols() != self.means.len() {
            return Err(PipelineError::WidthMismatch { expected: self.means.len(), got: m.cols() });
        }
        let mut out = m.clone();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            for ((v, &mean), &std) in row.iter_mut().zip(&self.means).zip(&self.stds) {
                *v = *v - mean;
                if std > F::zero() {
                    *v = *v / std;
                }
            }
        }
        Ok(out)
    }

    /// Number of zero-variance (centered-only) columns.
    pub fn constant_columns(&self) -> usize {
        self.stds.iter().filter(|s| **s == F::zero()).count()
    }
}
