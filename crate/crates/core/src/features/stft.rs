//! Short-time Fourier transform magnitudes.
//!
//! Frames of `segment_length` samples are taken every `hop` samples, each
//! multiplied pointwise by a periodic Hann window and transformed; the
//! one-sided magnitude spectrum of every frame goes into the feature
//! vector in frame-major order. No padding: only frames fully inside the
//! series are produced, so `frames = floor((len - segment_length) / hop) + 1`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::FeatureError;

/// Analysis window applied to each frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowFunction {
    Hann,
}

/// STFT configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StftParams {
    /// Samples per frame.
    pub segment_length: usize,
    /// Sample offset between successive frames.
    pub hop: usize,
    pub window_fn: WindowFunction,
}

impl Default for StftParams {
    fn default() -> Self {
        Self { segment_length: 128, hop: 64, window_fn: WindowFunction::Hann }
    }
}

impl StftParams {
    pub fn validate(&self, series_len: usize) -> Result<(), FeatureError> {
        if self.segment_length < 2 || self.hop == 0 || self.hop > self.segment_length {
            return Err(FeatureError::InvalidParams(format!(
                "stft segment {} / hop {} out of range",
                self.segment_length, self.hop
            )));
        }
        if series_len < self.segment_length {
            return Err(FeatureError::SeriesTooShort {
                needed: self.segment_length,
                got: series_len,
            });
        }
        Ok(())
    }

    /// Number of frames produced over a series of `series_len` samples.
    pub fn frames(&self, series_len: usize) -> usize {
        (series_len - self.segment_length) / self.hop + 1
    }

    /// One-sided bin count per frame.
    pub fn bins(&self) -> usize {
        self.segment_length / 2 + 1
    }
}

/// Periodic Hann window of length `n`: `0.5 * (1 - cos(2*pi*k/n))`.
///
/// The periodic form's DFT is exactly concentrated in bins 0 and ±1, which
/// keeps the spectrum of windowed integer-bin sinusoids compact.
pub fn hann_window(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos()))
        .collect()
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Plan (or fetch the cached plan for) a forward FFT of length `n`.
pub(crate) fn forward_fft(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

/// Compute the STFT magnitude grid, one row per frame, `segment/2 + 1`
/// columns.
pub fn stft<F: Scalar>(series: &[F], params: &StftParams) -> Result<Matrix<F>, FeatureError> {
    params.validate(series.len())?;
    let seg = params.segment_length;
    let frames = params.frames(series.len());
    let bins = params.bins();
    let window = match params.window_fn {
        WindowFunction::Hann => hann_window(seg),
    };
    let fft = forward_fft(seg);

    let mut out = Vec::with_capacity(frames * bins);
    let mut buf: Vec<Complex<f64>> = vec![Complex::default(); seg];
    for m in 0..frames {
        let start = m * params.hop;
        for (i, slot) in buf.iter_mut().enumerate() {
            *slot = Complex::new(series[start + i].as_f64() * window[i], 0.0);
        }
        fft.process(&mut buf);
        out.extend(buf[..bins].iter().map(|c| F::of(c.norm())));
    }
    Ok(Matrix::from_vec(frames, bins, out))
}
