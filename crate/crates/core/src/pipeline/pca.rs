//! Principal component analysis over a masked column subset.
//!
//! Fitting eigendecomposes the covariance of the masked, centered training
//! columns. When the mask is wider than the row count the decomposition
//! goes through the Gram matrix instead (same nonzero spectrum, recovered
//! components), which keeps the cost bounded by the training size.
//!
//! Transforming keeps unmasked columns unchanged (in their original order)
//! and appends the `k` projections. The sign of each component is fixed so
//! its largest-magnitude loading is positive, making fitted models
//! reproducible across runs and platforms.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::PipelineError;

/// Fitted PCA transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel<F> {
    /// Columns the reduction applies to.
    pub mask: Vec<usize>,
    /// Per-masked-column training means.
    pub means: Vec<F>,
    /// `k x mask.len()` orthonormal component rows, by decreasing variance.
    pub components: Matrix<F>,
    /// Eigenvalue (variance) per component, non-increasing.
    pub explained_variance: Vec<F>,
    /// Eigenvalue over total masked variance, non-increasing.
    pub explained_variance_ratio: Vec<F>,
    /// Trace of the masked covariance.
    pub total_variance: F,
    /// Width of the matrices this model was fitted on.
    pub input_cols: usize,
}

fn descending_order(values: &DVector<f64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    order
}

impl<F: Scalar> PcaModel<F> {
    /// Fit `k` components on the masked columns of the training matrix.
    ///
    /// `k` must satisfy `1 <= k <= min(rows - 1, mask.len())`.
    pub fn fit(train: &Matrix<F>, k: usize, mask: &[usize]) -> Result<Self, PipelineError> {
        if mask.is_empty() {
            return Err(PipelineError::EmptyMask);
        }
        if train.rows() == 0 {
            return Err(PipelineError::EmptyMatrix);
        }
        let n = train.rows();
        let m = mask.len();
        let max_k = m.min(n.saturating_sub(1));
        if k == 0 || k > max_k {
            return Err(PipelineError::KTooLarge { k, max: max_k });
        }

        let mut means = vec![0.0f64; m];
        for i in 0..n {
            let row = train.row(i);
            for (mean, &j) in means.iter_mut().zip(mask) {
                *mean += row[j].as_f64();
            }
        }
        for mean in &mut means {
            *mean /= n as f64;
        }
        let centered = DMatrix::from_fn(n, m, |i, j| train.get(i, mask[j]).as_f64() - means[j]);

        let total_variance: f64 = centered
            .column_iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>() / n as f64)
            .sum();

        let (mut eigvals, mut comps): (Vec<f64>, Vec<Vec<f64>>) = if m <= n {
            let cov = (centered.transpose() * &centered) / n as f64;
            let eig = nalgebra::SymmetricEigen::new(cov);
            let order = descending_order(&eig.eigenvalues);
            let vals = order.iter().take(k).map(|&i| eig.eigenvalues[i].max(0.0)).collect();
            let comps = order
                .iter()
                .take(k)
                .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
                .collect();
            (vals, comps)
        } else {
            // Dual form: eigenvectors of the covariance recovered from the
            // n x n Gram spectrum.
            let gram = (&centered * centered.transpose()) / n as f64;
            let eig = nalgebra::SymmetricEigen::new(gram);
            let order = descending_order(&eig.eigenvalues);
            let mut vals = Vec::with_capacity(k);
            let mut comps = Vec::with_capacity(k);
            for &i in order.iter().take(k) {
                vals.push(eig.eigenvalues[i].max(0.0));
                let mut v = centered.transpose() * eig.eigenvectors.column(i);
                let norm = v.norm();
                if norm > 0.0 {
                    v /= norm;
                }
                comps.push(v.iter().copied().collect());
            }
            (vals, comps)
        };

        // Sign convention: largest-magnitude loading positive.
        for comp in &mut comps {
            let (mut best, mut best_abs) = (0usize, -1.0f64);
            for (j, &v) in comp.iter().enumerate() {
                if v.abs() > best_abs {
                    best = j;
                    best_abs = v.abs();
                }
            }
            if comp[best] < 0.0 {
                for v in comp.iter_mut() {
                    *v = -*v;
                }
            }
        }
        // Numerical guard, not a tolerance of the contract.
        for v in &mut eigvals {
            if *v < 0.0 {
                *v = 0.0;
            }
        }

        let ratios: Vec<F> = eigvals
            .iter()
            .map(|&v| if total_variance > 0.0 { F::of(v / total_variance) } else { F::zero() })
            .collect();
        let components = Matrix::from_rows(
            comps
                .into_iter()
                .map(|row| row.into_iter().map(F::of).collect())
                .collect(),
        );

        Ok(Self {
            mask: mask.to_vec(),
            means: means.into_iter().map(F::of).collect(),
            components,
            explained_variance: eigvals.into_iter().map(F::of).collect(),
            explained_variance_ratio: ratios,
            total_variance: F::of(total_variance),
            input_cols: train.cols(),
        })
    }

    pub fn k(&self) -> usize {
        self.components.rows()
    }

    /// Model reduced to the leading `k` components; the fit is unchanged.
    pub fn truncate(&self, k: usize) -> Result<Self, PipelineError> {
        if k == 0 || k > self.k() {
            return Err(PipelineError::KTooLarge { k, max: self.k() });
        }
        let rows: Vec<usize> = (0..k).collect();
        Ok(Self {
            mask: self.mask.clone(),
            means: self.means.clone(),
            components: self.components.select_rows(&rows),
            explained_variance: self.explained_variance[..k].to_vec(),
            explained_variance_ratio: self.explained_variance_ratio[..k].to_vec(),
            total_variance: self.total_variance,
            input_cols: self.input_cols,
        })
    }

    /// Unmasked columns (original order) followed by the `k` projections.
    pub fn transform(&self, m: &Matrix<F>) -> Result<Matrix<F>, PipelineError> {
        if m.cols() != self.input_cols {
            return Err(PipelineError::WidthMismatch { expected: self.input_cols, got: m.cols() });
        }
        let masked: std::collections::HashSet<usize> = self.mask.iter().copied().collect();
        let passthrough: Vec<usize> = (0..m.cols()).filter(|j| !masked.contains(j)).collect();
        let k = self.k();
        let out_cols = passthrough.len() + k;

        let rows: Vec<Vec<F>> = (0..m.rows())
            .into_par_iter()
            .map(|i| {
                let row = m.row(i);
                let mut out = Vec::with_capacity(out_cols);
                out.extend(passthrough.iter().map(|&j| row[j]));
                for c in 0..k {
                    let comp = self.components.row(c);
                    let mut acc = F::zero();
                    for ((&j, &mean), &w) in self.mask.iter().zip(&self.means).zip(comp) {
                        acc += w * (row[j] - mean);
                    }
                    out.push(acc);
                }
                out
            })
            .collect();
        Ok(Matrix::from_rows(rows))
    }

    /// Map projections back to the masked block: `components^T * p + mean`.
    pub fn reconstruct(&self, projections: &Matrix<F>) -> Matrix<F> {
        assert_eq!(projections.cols(), self.k());
        let m = self.mask.len();
        let rows: Vec<Vec<F>> = (0..projections.rows())
            .map(|i| {
                let p = projections.row(i);
                let mut out = self.means.clone();
                for (c, &coef) in p.iter().enumerate() {
                    let comp = self.components.row(c);
                    for j in 0..m {
                        out[j] += coef * comp[j];
                    }
                }
                out
            })
            .collect();
        Matrix::from_rows(rows)
    }

    /// The mask as schema names, for serialized models.
    pub fn mask_names(&self, names: &[String]) -> Vec<String> {
        self.mask.iter().map(|&j| names[j].clone()).collect()
    }

    /// Column names of the transformed space.
    pub fn output_names(&self, names: &[String]) -> Vec<String> {
        let masked: std::collections::HashSet<usize> = self.mask.iter().copied().collect();
        let mut out: Vec<String> = (0..self.input_cols)
            .filter(|j| !masked.contains(j))
            .map(|j| names[j].clone())
            .collect();
        out.extend((0..self.k()).map(|c| format!("pc{c}")));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_line_explains_everything() {
        let pts: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, i as f64]).collect();
        let m = Matrix::from_rows(pts);
        let pca = PcaModel::fit(&m, 1, &[0, 1]).unwrap();
        assert!((pca.explained_variance_ratio[0] - 1.0).abs() < 1e-9);
        // Both loadings equal and positive under the sign convention.
        let c = pca.components.row(0);
        assert!((c[0] - c[1]).abs() < 1e-9 && c[0] > 0.0);
    }

    #[test]
    fn full_rank_reconstruction() {
        let mut v = 0.37_f64;
        let mut next = move || {
            v = (v * 997.0 + 0.123).fract();
            v * 4.0 - 2.0
        };
        let rows: Vec<Vec<f64>> = (0..50).map(|_| (0..8).map(|_| next()).collect()).collect();
        let m = Matrix::from_rows(rows);
        let mask: Vec<usize> = (0..8).collect();
        let pca = PcaModel::fit(&m, 8, &mask).unwrap();
        let projected = pca.transform(&m).unwrap();
        let recon = pca.reconstruct(&projected);
        for i in 0..m.rows() {
            for j in 0..8 {
                assert!((recon.get(i, j) - m.get(i, j)).abs() < 1e-8);
            }
        }
        let ratio_sum: f64 = pca.explained_variance_ratio.iter().sum();
        assert!((ratio_sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn components_are_orthonormal() {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| (0..5).map(|j| ((i * 13 + j * 7) % 17) as f64 - 8.0).collect())
            .collect();
        let m = Matrix::from_rows(rows);
        let pca = PcaModel::fit(&m, 4, &[0, 1, 2, 3, 4]).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let dot: f64 = pca
                    .components
                    .row(a)
                    .iter()
                    .zip(pca.components.row(b))
                    .map(|(x, y)| x * y)
                    .sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-8, "components {a},{b}: {dot}");
            }
        }
    }

    #[test]
    fn gram_path_matches_direct_path() {
        // 6 rows, 10 masked columns forces the dual (Gram) path; compare
        // against the direct path on the transposed problem size.
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..10).map(|j| ((i * 31 + j * 17) % 23) as f64 / 3.0).collect())
            .collect();
        let m = Matrix::from_rows(rows);
        let mask: Vec<usize> = (0..10).collect();
        let pca = PcaModel::fit(&m, 3, &mask).unwrap();
        // Projections of the training data must have variance equal to the
        // eigenvalues, whichever path produced them.
        let t = pca.transform(&m).unwrap();
        for c in 0..3 {
            let col = t.cols() - 3 + c;
            let mean: f64 = t.column(col).sum::<f64>() / 6.0;
            let var: f64 = t.column(col).map(|v| (v - mean) * (v - mean)).sum::<f64>() / 6.0;
            assert!(
                (var - pca.explained_variance[c]).abs() < 1e-8,
                "component {c}: var {var} vs eigenvalue {}",
                pca.explained_variance[c]
            );
        }
    }

    #[test]
    fn unmasked_columns_pass_through() {
        let m = Matrix::from_rows(vec![
            vec![1.0, 10.0, 2.0],
            vec![2.0, 20.0, 1.0],
            vec![3.0, 30.0, 0.0],
        ]);
        let pca = PcaModel::fit(&m, 1, &[0, 2]).unwrap();
        let t = pca.transform(&m).unwrap();
        assert_eq!(t.cols(), 2);
        assert_eq!(t.column(0).collect::<Vec<_>>(), vec![10.0, 20.0, 30.0]);
    }

    #[test]
    fn k_bounds_enforced() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        assert!(matches!(
            PcaModel::fit(&m, 3, &[0, 1]),
            Err(PipelineError::KTooLarge { k: 3, max: 2 })
        ));
        assert!(matches!(PcaModel::fit(&m, 1, &[]), Err(PipelineError::EmptyMask)));
        assert!(matches!(
            PcaModel::fit(&m, 0, &[0]),
            Err(PipelineError::KTooLarge { k: 0, .. })
        ));
    }

    #[test]
    fn truncation_prefixes_the_full_fit() {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| (0..4).map(|j| ((i * 7 + j * 5) % 11) as f64).collect())
            .collect();
        let m = Matrix::from_rows(rows);
        let full = PcaModel::fit(&m, 3, &[0, 1, 2, 3]).unwrap();
        let cut = full.truncate(2).unwrap();
        assert_eq!(cut.k(), 2);
        assert_eq!(cut.explained_variance, full.explained_variance[..2].to_vec());
        assert_eq!(cut.components.row(1), full.components.row(1));
    }
}
