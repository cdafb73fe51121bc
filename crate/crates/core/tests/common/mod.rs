// Each integration test binary compiles its own copy; not all of them use
// every oracle.
#![allow(dead_code)]

//! Independent oracles for the acceptance suite.
//!
//! Everything here recomputes results from first principles with code
//! paths disjoint from the library implementation: naive O(n^2) DFTs,
//! pairwise Haar recursion, direct moment sums, power iteration with
//! deflation, exhaustive split search, and exhaustive neighbor sort.

use rotorvib_core::matrix::Matrix;
use rotorvib_core::models::{DecisionTree, Node};

/// Naive O(n^2) DFT magnitudes of a pre-windowed frame (one-sided).
pub fn naive_dft_magnitudes(frame: &[f64]) -> Vec<f64> {
    let n = frame.len();
    let bins = n / 2 + 1;
    let mut out = Vec::with_capacity(bins);
    for k in 0..bins {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, &x) in frame.iter().enumerate() {
            let angle = 2.0 * std::f64::consts::PI * k as f64 * i as f64 / n as f64;
            re += x * angle.cos();
            im -= x * angle.sin();
        }
        out.push((re * re + im * im).sqrt());
    }
    out
}

/// Pairwise Haar averaging/differencing recursion: terminal energies of
/// the full packet tree in natural order.
pub fn haar_packet_energies_recursive(series: &[f64], levels: usize) -> Vec<f64> {
    fn recurse(signal: Vec<f64>, level: usize, out: &mut Vec<f64>) {
        if level == 0 {
            out.push(signal.iter().map(|c| c * c).sum());
            return;
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut approx = Vec::with_capacity(signal.len() / 2);
        let mut detail = Vec::with_capacity(signal.len() / 2);
        for pair in signal.chunks_exact(2) {
            approx.push((pair[0] + pair[1]) * s);
            detail.push((pair[0] - pair[1]) * s);
        }
        recurse(approx, level - 1, out);
        recurse(detail, level - 1, out);
    }
    let mut out = Vec::with_capacity(1 << levels);
    recurse(series.to_vec(), levels, &mut out);
    out
}

/// Direct banded moment sums over a spectrum: (centroid, spread, skewness).
/// Skewness is `None` when the spread vanishes.
pub fn direct_spectral_moments(
    freqs: &[f64],
    mags: &[f64],
    lo: usize,
    hi: usize,
) -> (f64, f64, Option<f64>) {
    let total: f64 = mags[lo..=hi].iter().sum();
    let mu1: f64 = (lo..=hi).map(|k| freqs[k] * mags[k]).sum::<f64>() / total;
    let mu2: f64 =
        ((lo..=hi).map(|k| (freqs[k] - mu1).powi(2) * mags[k]).sum::<f64>() / total).sqrt();
    let mu3 = if mu2 > 0.0 {
        Some((lo..=hi).map(|k| (freqs[k] - mu1).powi(3) * mags[k]).sum::<f64>() / (mu2.powi(3) * total))
    } else {
        None
    };
    (mu1, mu2, mu3)
}

/// Population covariance of the masked columns, centered independently.
pub fn naive_covariance(x: &Matrix<f64>, mask: &[usize]) -> Vec<Vec<f64>> {
    let n = x.rows();
    let m = mask.len();
    let means: Vec<f64> = mask
        .iter()
        .map(|&j| x.column(j).sum::<f64>() / n as f64)
        .collect();
    let mut cov = vec![vec![0.0; m]; m];
    for i in 0..n {
        let row = x.row(i);
        for a in 0..m {
            let da = row[mask[a]] - means[a];
            for b in a..m {
                cov[a][b] += da * (row[mask[b]] - means[b]);
            }
        }
    }
    for a in 0..m {
        for b in a..m {
            cov[a][b] /= n as f64;
            cov[b][a] = cov[a][b];
        }
    }
    cov
}

/// Leading eigenvalues of a symmetric matrix by power iteration with
/// deflation.
pub fn power_iteration_eigenvalues(cov: &[Vec<f64>], k: usize) -> Vec<f64> {
    let m = cov.len();
    let mut a: Vec<Vec<f64>> = cov.to_vec();
    let mut eigenvalues = Vec::with_capacity(k);
    for round in 0..k {
        let mut v: Vec<f64> = (0..m)
            .map(|i| (((i + 1) * (round + 3)) as f64 * 0.7391).sin())
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let mut lambda = 0.0;
        for _ in 0..20_000 {
            let mut w = vec![0.0; m];
            for i in 0..m {
                for j in 0..m {
                    w[i] += a[i][j] * v[j];
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            w.iter_mut().for_each(|x| *x /= norm);
            let new_lambda: f64 = (0..m)
                .map(|i| {
                    let av: f64 = (0..m).map(|j| a[i][j] * w[j]).sum();
                    w[i] * av
                })
                .sum();
            let done = (new_lambda - lambda).abs() <= 1e-13 * new_lambda.abs().max(1.0);
            v = w;
            lambda = new_lambda;
            if done {
                break;
            }
        }
        eigenvalues.push(lambda);
        for i in 0..m {
            for j in 0..m {
                a[i][j] -= lambda * v[i] * v[j];
            }
        }
    }
    eigenvalues
}

/// Weighted Gini impurity of a binary split, same algebraic form as the
/// builder but recomputed from scratch.
pub fn weighted_gini(left: [usize; 2], right: [usize; 2]) -> f64 {
    let gini = |c: [usize; 2]| {
        let n = (c[0] + c[1]) as f64;
        if n == 0.0 {
            return 0.0;
        }
        let p0 = c[0] as f64 / n;
        let p1 = c[1] as f64 / n;
        1.0 - p0 * p0 - p1 * p1
    };
    let n = (left[0] + left[1] + right[0] + right[1]) as f64;
    let nl = (left[0] + left[1]) as f64;
    let nr = (right[0] + right[1]) as f64;
    (nl / n) * gini(left) + (nr / n) * gini(right)
}

/// Exhaustive best split over all (feature, midpoint) candidates for the
/// given rows: `(feature, threshold, weighted_impurity)` under the
/// lowest-feature-then-lowest-threshold tie rule.
pub fn brute_force_best_split(
    x: &Matrix<f64>,
    y: &[u8],
    rows: &[usize],
) -> Option<(usize, f64, f64)> {
    let parent = {
        let c = class_counts(y, rows);
        weighted_gini(c, [0, 0])
    };
    let mut best: Option<(usize, f64, f64)> = None;
    for feature in 0..x.cols() {
        let mut values: Vec<f64> = rows.iter().map(|&i| x.get(i, feature)).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        for w in 0..values.len().saturating_sub(1) {
            let threshold = (values[w] + values[w + 1]) / 2.0;
            if !(threshold >= values[w] && threshold < values[w + 1]) {
                continue;
            }
            let mut left = [0usize; 2];
            let mut right = [0usize; 2];
            for &i in rows {
                if x.get(i, feature) <= threshold {
                    left[y[i] as usize] += 1;
                } else {
                    right[y[i] as usize] += 1;
                }
            }
            let weighted = weighted_gini(left, right);
            let better = match best {
                None => weighted < parent,
                Some((_, _, b)) => weighted < b,
            };
            if better {
                best = Some((feature, threshold, weighted));
            }
        }
    }
    best
}

pub fn class_counts(y: &[u8], rows: &[usize]) -> [usize; 2] {
    let mut c = [0usize; 2];
    for &i in rows {
        c[y[i] as usize] += 1;
    }
    c
}

/// Walk a trained tree alongside the training data, checking every split
/// against the exhaustive search and recomputing importances from routed
/// rows. Returns the recomputed per-feature importance accumulator.
pub fn verify_tree_splits(
    tree: &DecisionTree<f64>,
    x: &Matrix<f64>,
    y: &[u8],
) -> Result<Vec<f64>, String> {
    let mut importances = vec![0.0; x.cols()];
    let rows: Vec<usize> = (0..x.rows()).collect();
    verify_node(tree.root(), x, y, &rows, x.rows(), &mut importances)?;
    Ok(importances)
}

fn verify_node(
    node: &Node<f64>,
    x: &Matrix<f64>,
    y: &[u8],
    rows: &[usize],
    n_train: usize,
    importances: &mut Vec<f64>,
) -> Result<(), String> {
    match node {
        Node::Leaf { counts, .. } => {
            let actual = class_counts(y, rows);
            if *counts != actual {
                return Err(format!("leaf counts {counts:?} != routed {actual:?}"));
            }
            Ok(())
        }
        Node::Internal { feature, threshold, counts, impurity, child_impurity, left, right } => {
            let actual = class_counts(y, rows);
            if *counts != actual {
                return Err(format!("node counts {counts:?} != routed {actual:?}"));
            }
            let parent = weighted_gini(actual, [0, 0]);
            if (parent - impurity).abs() > 1e-12 {
                return Err(format!("node impurity {impurity} != recomputed {parent}"));
            }
            let (bf, bt, bw) = brute_force_best_split(x, y, rows)
                .ok_or_else(|| "tree split where oracle finds none".to_string())?;
            if bf != *feature || bt != *threshold {
                return Err(format!(
                    "split ({feature}, {threshold}) != oracle ({bf}, {bt})"
                ));
            }
            if (bw - child_impurity).abs() > 1e-12 {
                return Err(format!("weighted impurity {child_impurity} != oracle {bw}"));
            }
            let weight = rows.len() as f64 / n_train as f64;
            importances[*feature] += weight * (parent - bw);

            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&i| x.get(i, *feature) <= *threshold);
            verify_node(left, x, y, &left_rows, n_train, importances)?;
            verify_node(right, x, y, &right_rows, n_train, importances)
        }
    }
}

/// Exhaustive kNN prediction with the documented tie-breaks: sort by
/// (squared distance, index), take k, majority, vote tie -> nearest label.
pub fn brute_force_knn_predict(
    train: &Matrix<f64>,
    labels: &[u8],
    query: &[f64],
    k: usize,
) -> u8 {
    let mut all: Vec<(f64, usize)> = (0..train.rows())
        .map(|i| {
            let d2: f64 = train
                .row(i)
                .iter()
                .zip(query)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (d2, i)
        })
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let top = &all[..k];
    let ones = top.iter().filter(|(_, i)| labels[*i] == 1).count();
    let zeros = k - ones;
    if ones > zeros {
        1
    } else if zeros > ones {
        0
    } else {
        labels[top[0].1]
    }
}

/// Simple deterministic pseudo-random stream for oracle inputs (distinct
/// from the library's generators).
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
