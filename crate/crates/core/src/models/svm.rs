//! Binary SVM trained by sequential minimal optimization.
//!
//! The dual problem is solved by repeated analytic optimization of one
//! pair of multipliers at a time, with the classic working-pair
//! heuristics: first choice scans KKT violators (alternating full and
//! non-bound sweeps), second choice maximizes the error difference. The
//! kernel matrix is precomputed, so each pair update costs O(n) for the
//! error-cache refresh.
//!
//! Labels map to ±1 internally; the decision value is
//! `f(x) = sum_i alpha_i y_i K(x_i, x) + b` and class 1 is predicted when
//! `f(x) >= 0`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::ModelError;

/// Kernel selection for [`SvmConfig`]; `gamma: None` resolves to
/// `1 / (n_features * mean feature variance)` at fit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: Option<f64> },
}

/// SVM hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvmConfig {
    pub kernel: KernelSpec,
    /// Box constraint on the dual coefficients.
    pub c: f64,
    /// KKT violation tolerance.
    pub tol: f64,
    /// Cap on outer optimization sweeps; exceeding it returns the best
    /// iterate with `converged = false`.
    pub max_passes: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self { kernel: KernelSpec::Rbf { gamma: None }, c: 1.0, tol: 1e-3, max_passes: 300 }
    }
}

/// Resolved kernel stored inside a trained model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel<F> {
    Linear,
    Rbf { gamma: F },
}

impl<F: Scalar> Kernel<F> {
    pub fn eval(&self, a: &[F], b: &[F]) -> F {
        match self {
            Kernel::Linear => {
                let mut acc = F::zero();
                for (&u, &v) in a.iter().zip(b) {
                    acc += u * v;
                }
                acc
            }
            Kernel::Rbf { gamma } => {
                let mut acc = F::zero();
                for (&u, &v) in a.iter().zip(b) {
                    let d = u - v;
                    acc += d * d;
                }
                (-*gamma * acc).exp()
            }
        }
    }
}

/// Trained SVM: support vectors with their dual coefficients and bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel<F> {
    pub kernel: Kernel<F>,
    pub support_vectors: Matrix<F>,
    /// `alpha_i * y_i` per support vector.
    pub coefficients: Vec<F>,
    /// `alpha_i` per support vector; all within `[0, C]`.
    pub alphas: Vec<F>,
    pub bias: F,
    pub c: F,
    /// False when `max_passes` ran out before all KKT violations cleared.
    pub converged: bool,
    /// Largest KKT violation at the final iterate.
    pub kkt_residual: F,
    n_features: usize,
}

struct Smo<'a> {
    k: &'a [Vec<f64>],
    t: &'a [f64],
    alpha: Vec<f64>,
    errors: Vec<f64>,
    b: f64,
    c: f64,
    tol: f64,
    rng: ChaCha8Rng,
}

const PROGRESS_EPS: f64 = 1e-10;

impl Smo<'_> {
    fn non_bound(&self) -> Vec<usize> {
        (0..self.alpha.len())
            .filter(|&i| self.alpha[i] > 0.0 && self.alpha[i] < self.c)
            .collect()
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1_old, a2_old) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.t[i1], self.t[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;

        let (lo, hi) = if (y1 - y2).abs() > 0.5 {
            ((a2_old - a1_old).max(0.0), (self.c + a2_old - a1_old).min(self.c))
        } else {
            ((a2_old + a1_old - self.c).max(0.0), (a2_old + a1_old).min(self.c))
        };
        if lo >= hi {
            return false;
        }

        let k11 = self.k[i1][i1];
        let k12 = self.k[i1][i2];
        let k22 = self.k[i2][i2];
        let eta = k11 + k22 - 2.0 * k12;
        if eta <= 0.0 {
            // Degenerate curvature (duplicate points); skip the pair.
            return false;
        }
        let mut a2 = a2_old + y2 * (e1 - e2) / eta;
        a2 = a2.clamp(lo, hi);
        if (a2 - a2_old).abs() < PROGRESS_EPS * (a2 + a2_old + PROGRESS_EPS) {
            return false;
        }
        let a1 = a1_old + s * (a2_old - a2);

        let d1 = a1 - a1_old;
        let d2 = a2 - a2_old;
        let b_old = self.b;
        let b1 = b_old - e1 - y1 * d1 * k11 - y2 * d2 * k12;
        let b2 = b_old - e2 - y1 * d1 * k12 - y2 * d2 * k22;
        self.b = if a1 > 0.0 && a1 < self.c {
            b1
        } else if a2 > 0.0 && a2 < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };

        self.alpha[i1] = a1;
        self.alpha[i2] = a2;
        let db = self.b - b_old;
        for i in 0..self.errors.len() {
            self.errors[i] += y1 * d1 * self.k[i1][i] + y2 * d2 * self.k[i2][i] + db;
        }
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        let a2 = self.alpha[i2];
        let e2 = self.errors[i2];
        let r2 = e2 * self.t[i2];
        let violates = (r2 < -self.tol && a2 < self.c) || (r2 > self.tol && a2 > 0.0);
        if !violates {
            return false;
        }

        let non_bound = self.non_bound();
        if non_bound.len() > 1 {
            // Second-choice heuristic: maximize |E1 - E2|.
            let i1 = non_bound
                .iter()
                .copied()
                .max_by(|&a, &b| {
                    let da = (self.errors[a] - e2).abs();
                    let db = (self.errors[b] - e2).abs();
                    da.partial_cmp(&db).unwrap().then(b.cmp(&a))
                })
                .unwrap();
            if self.take_step(i1, i2) {
                return true;
            }
        }
        let start = if non_bound.is_empty() {
            0
        } else {
            self.rng.random_range(0..non_bound.len())
        };
        for off in 0..non_bound.len() {
            let i1 = non_bound[(start + off) % non_bound.len()];
            if self.take_step(i1, i2) {
                return true;
            }
        }
        let n = self.alpha.len();
        let start = self.rng.random_range(0..n);
        for off in 0..n {
            let i1 = (start + off) % n;
            if self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }

    fn max_kkt_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.alpha.len() {
            let r = self.errors[i] * self.t[i];
            if self.alpha[i] < self.c {
                worst = worst.max(-r);
            }
            if self.alpha[i] > 0.0 {
                worst = worst.max(r);
            }
        }
        worst
    }
}

impl<F: Scalar> SvmModel<F> {
    /// Solve the dual problem on the given training rows.
    ///
    /// Returns `SingleClass` when only one label is present. Hitting
    /// `max_passes` is not an error: the best iterate is returned with
    /// `converged = false`.
    pub fn fit(x: &Matrix<F>, y: &[u8], config: &SvmConfig, seed: u64) -> Result<Self, ModelError> {
        let n = x.rows();
        if n == 0 {
            return Err(ModelError::EmptyTrainSet);
        }
        assert_eq!(n, y.len());
        if y.iter().all(|&l| l == y[0]) {
            return Err(ModelError::SingleClass);
        }

        let kernel = resolve_kernel::<F>(x, &config.kernel);
        let kernel64 = match kernel {
            Kernel::Linear => Kernel::<f64>::Linear,
            Kernel::Rbf { gamma } => Kernel::Rbf { gamma: gamma.as_f64() },
        };
        let rows64: Vec<Vec<f64>> = x
            .iter_rows()
            .map(|r| r.iter().map(|v| v.as_f64()).collect())
            .collect();
        let k: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| kernel64.eval(&rows64[i], &rows64[j])).collect())
            .collect();
        let t: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();

        let mut smo = Smo {
            k: &k,
            t: &t,
            alpha: vec![0.0; n],
            errors: t.iter().map(|&ti| -ti).collect(), // f = 0 initially
            b: 0.0,
            c: config.c,
            tol: config.tol,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };

        let mut examine_all = true;
        let mut converged = false;
        for _pass in 0..config.max_passes {
            let mut changed = 0usize;
            if examine_all {
                for i in 0..n {
                    changed += smo.examine(i) as usize;
                }
            } else {
                for i in smo.non_bound() {
                    changed += smo.examine(i) as usize;
                }
            }
            if examine_all {
                if changed == 0 {
                    converged = true;
                    break;
                }
                examine_all = false;
            } else if changed == 0 {
                examine_all = true;
            }
        }

        let kkt_residual = smo.max_kkt_violation();
        let sv_indices: Vec<usize> = (0..n).filter(|&i| smo.alpha[i] > 1e-12).collect();
        let support_vectors = x.select_rows(&sv_indices);
        let coefficients = sv_indices.iter().map(|&i| F::of(smo.alpha[i] * t[i])).collect();
        let alphas = sv_indices.iter().map(|&i| F::of(smo.alpha[i])).collect();

        Ok(Self {
            kernel,
            support_vectors,
            coefficients,
            alphas,
            bias: F::of(smo.b),
            c: F::of(config.c),
            converged,
            kkt_residual: F::of(kkt_residual),
            n_features: x.cols(),
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_support_vectors(&self) -> usize {
        self.support_vectors.rows()
    }

    pub fn decision_value(&self, row: &[F]) -> F {
        let mut acc = self.bias;
        for (i, coef) in self.coefficients.iter().enumerate() {
            acc += *coef * self.kernel.eval(self.support_vectors.row(i), row);
        }
        acc
    }

    pub fn predict_row(&self, row: &[F]) -> u8 {
        if self.decision_value(row) >= F::zero() {
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
}

/// Resolve the configured kernel against the training data (gamma "scale"
/// heuristic when unset).
fn resolve_kernel<F: Scalar>(x: &Matrix<F>, spec: &KernelSpec) -> Kernel<F> {
    match spec {
        KernelSpec::Linear => Kernel::Linear,
        KernelSpec::Rbf { gamma: Some(g) } => Kernel::Rbf { gamma: F::of(*g) },
        KernelSpec::Rbf { gamma: None } => {
            let n = x.rows() as f64;
            let f = x.cols();
            let mut mean_var = 0.0f64;
            for j in 0..f {
                let mean: f64 = x.column(j).map(|v| v.as_f64()).sum::<f64>() / n;
                let var: f64 = x
                    .column(j)
                    .map(|v| {
                        let d = v.as_f64() - mean;
                        d * d
                    })
                    .sum::<f64>()
                    / n;
                mean_var += var;
            }
            mean_var /= f as f64;
            let gamma = if mean_var > 0.0 { 1.0 / (f as f64 * mean_var) } else { 1.0 / f as f64 };
            Kernel::Rbf { gamma: F::of(gamma) }
        }
    }
}
