//! Wavelet packet energies.
//!
//! Full wavelet packet decomposition: both the approximation and the detail
//! branch are split recursively, so depth `L` produces `2^L` terminal nodes
//! covering low and high frequency content alike. The feature per node is
//! the sum of squared coefficients, reported in natural (Paley) order.
//! Since the filter banks are orthonormal and the series length divides
//! evenly, the energies sum to the series' total energy (Parseval).

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::FeatureError;

/// Orthonormal two-channel filter pair used for the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveletFilter {
    /// Two-tap Haar pair; exactly reproducible by pairwise averaging and
    /// differencing.
    Haar,
    /// Four-tap Daubechies pair.
    Db2,
}

impl WaveletFilter {
    /// Lowpass (scaling) coefficients.
    pub fn lowpass(self) -> Vec<f64> {
        match self {
            WaveletFilter::Haar => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                vec![s, s]
            }
            WaveletFilter::Db2 => {
                let sqrt3 = 3.0_f64.sqrt();
                let norm = 4.0 * std::f64::consts::SQRT_2;
                vec![
                    (1.0 + sqrt3) / norm,
                    (3.0 + sqrt3) / norm,
                    (3.0 - sqrt3) / norm,
                    (1.0 - sqrt3) / norm,
                ]
            }
        }
    }

    /// Highpass (wavelet) coefficients via the quadrature mirror relation
    /// `g[k] = (-1)^k h[L-1-k]`.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|k| {
                let v = h[l - 1 - k];
                if k % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect()
    }
}

/// One filter-and-downsample step with periodic boundary handling:
/// `out[i] = sum_k filter[k] * x[(2i + k) mod n]`.
fn analyze<F: Scalar>(signal: &[F], filter: &[F]) -> Vec<F> {
    let n = signal.len();
    let half = n / 2;
    let mut out = Vec::with_capacity(half);
    for i in 0..half {
        let mut acc = F::zero();
        for (k, &c) in filter.iter().enumerate() {
            acc += c * signal[(2 * i + k) % n];
        }
        out.push(acc);
    }
    out
}

/// Terminal-node energies of the full wavelet packet decomposition to
/// `levels` (so `2^levels` values). The series length must be divisible by
/// `2^levels`.
pub fn wavelet_packet_energies<F: Scalar>(
    series: &[F],
    levels: usize,
    filter: WaveletFilter,
) -> Result<Vec<F>, FeatureError> {
    let divisor = 1usize << levels;
    if series.is_empty() || series.len() % divisor != 0 {
        return Err(FeatureError::LengthNotDivisible { len: series.len(), divisor });
    }
    let lo: Vec<F> = filter.lowpass().into_iter().map(F::of).collect();
    let hi: Vec<F> = filter.highpass().into_iter().map(F::of).collect();

    let mut nodes: Vec<Vec<F>> = vec![series.to_vec()];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(nodes.len() * 2);
        for node in &nodes {
            next.push(analyze(node, &lo));
            next.push(analyze(node, &hi));
        }
        nodes = next;
    }
    Ok(nodes
        .iter()
        .map(|coeffs| coeffs.iter().map(|&c| c * c).sum())
        .collect())
}
