//! Time-domain statistics of a sample series.

use crate::scalar::Scalar;

use super::FeatureError;

/// Euclidean magnitude of one tri-axial record.
pub fn magnitude<F: Scalar>(x: F, y: F, z: F) -> F {
    (x * x + y * y + z * z).sqrt()
}

/// Half the peak-to-peak excursion: `(max - min) / 2`.
pub fn amplitude<F: Scalar>(series: &[F]) -> Result<F, FeatureError> {
    let (min, max) = min_max(series)?;
    Ok((max - min) / F::of(2.0))
}

/// Arithmetic mean.
pub fn mean<F: Scalar>(series: &[F]) -> Result<F, FeatureError> {
    if series.is_empty() {
        return Err(FeatureError::EmptySeries);
    }
    let sum: F = series.iter().copied().sum();
    Ok(sum / F::of_usize(series.len()))
}

/// Population standard deviation (denominator `n`).
pub fn std_dev<F: Scalar>(series: &[F]) -> Result<F, FeatureError> {
    let m = mean(series)?;
    let ss: F = series.iter().map(|&v| (v - m) * (v - m)).sum();
    Ok((ss / F::of_usize(series.len())).sqrt())
}

/// Shannon entropy (bits) of the series' amplitude histogram.
///
/// The histogram uses `num_bins` equal-width bins over the series' own
/// `[min, max]`; empty bins contribute nothing. A constant series carries a
/// single event with probability 1 and returns 0 by convention. The result
/// lies in `[0, log2(num_bins)]`.
pub fn shannon_entropy<F: Scalar>(series: &[F], num_bins: usize) -> Result<F, FeatureError> {
    if num_bins < 2 {
        return Err(FeatureError::InvalidParams(format!(
            "entropy needs at least 2 bins, got {num_bins}"
        )));
    }
    let (min, max) = min_max(series)?;
    if min == max {
        return Ok(F::zero());
    }

    let mut counts = vec![0usize; num_bins];
    let width = (max - min) / F::of_usize(num_bins);
    for &v in series {
        let idx = ((v - min) / width).to_usize().unwrap_or(0).min(num_bins - 1);
        counts[idx] += 1;
    }

    let n = F::of_usize(series.len());
    let mut h = F::zero();
    for &count in counts.iter().filter(|&&c| c > 0) {
        let p = F::of_usize(count) / n;
        h -= p * p.log2();
    }
    Ok(h)
}

fn min_max<F: Scalar>(series: &[F]) -> Result<(F, F), FeatureError> {
    if series.is_empty() {
        return Err(FeatureError::EmptySeries);
    }
    let mut min = series[0];
    let mut max = series[0];
    for &v in &series[1..] {
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    Ok((min, max))
}
