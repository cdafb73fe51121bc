//! Per-window feature extraction.
//!
//! For each sensor and axis the extractor computes four time-domain
//! statistics (amplitude, mean, standard deviation, Shannon entropy), the
//! flattened STFT magnitude grid, the terminal wavelet packet energies, the
//! spectral centroid, and the spectral skewness, concatenated Central
//! sensor first. The companion [`FeatureSchema`] names every slot.
//!
//! All extractors are pure; corpus extraction parallelizes across window
//! pairs with output order independent of scheduling.

pub mod schema;
pub mod spectral;
pub mod stats;
pub mod stft;
pub mod wavelet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Axis, VibrationRecord, Window, WindowPair};
use crate::scalar::Scalar;

pub use schema::{FamilyAccounting, FeatureDescriptor, FeatureFamily, FeatureSchema};
pub use spectral::{periodogram, spectral_centroid, spectral_skewness, spectral_spread, Band, Spectrum};
pub use stats::{amplitude, magnitude, mean, shannon_entropy, std_dev};
pub use stft::{hann_window, stft, StftParams, WindowFunction};
pub use wavelet::{wavelet_packet_energies, WaveletFilter};

/// Feature computation failure.
#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("series is empty")]
    EmptySeries,
    #[error("series too short: need {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("series length {len} not divisible by {divisor}")]
    LengthNotDivisible { len: usize, divisor: usize },
    #[error("spectrum carries no energy in the analysis band")]
    ZeroSpectrum,
    #[error("spectral spread is zero; skewness undefined")]
    DegenerateSpectrum,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("feature {index} is not finite")]
    NonFinite { index: usize },
    #[error("window pair has mismatched lengths: central {central}, outer {outer}")]
    MismatchedPair { central: usize, outer: usize },
    #[error("window length {got} differs from corpus window length {expected}")]
    MixedWindowLength { expected: usize, got: usize },
}

/// Extraction configuration; defaults match the 800-sample window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureConfig {
    pub stft: StftParams,
    pub entropy_bins: usize,
    pub wavelet_levels: usize,
    pub wavelet_filter: WaveletFilter,
    pub sample_rate_hz: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            stft: StftParams::default(),
            entropy_bins: 16,
            wavelet_levels: 3,
            wavelet_filter: WaveletFilter::Haar,
            sample_rate_hz: crate::ingest::SAMPLE_RATE_HZ as f64,
        }
    }
}

impl FeatureConfig {
    /// Schema produced for windows of `window_len` samples.
    pub fn schema_for(&self, window_len: usize) -> Result<FeatureSchema, FeatureError> {
        self.stft.validate(window_len)?;
        Ok(FeatureSchema::new(
            self.stft.frames(window_len),
            self.stft.bins(),
            1 << self.wavelet_levels,
        ))
    }
}

/// One window pair's schema-ordered feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<F> {
    pub values: Vec<F>,
    pub experiment_id: String,
    pub label: u8,
    /// Slots where a degenerate spectrum forced skewness to 0.
    pub substituted_skewness: usize,
}

fn extract_axis<F: Scalar>(
    series: &[F],
    config: &FeatureConfig,
    out: &mut Vec<F>,
    substituted: &mut usize,
) -> Result<(), FeatureError> {
    out.push(stats::amplitude(series)?);
    out.push(stats::mean(series)?);
    out.push(stats::std_dev(series)?);
    out.push(stats::shannon_entropy(series, config.entropy_bins)?);

    let grid = stft::stft(series, &config.stft)?;
    out.extend_from_slice(grid.as_slice());

    out.extend(wavelet::wavelet_packet_energies(
        series,
        config.wavelet_levels,
        config.wavelet_filter,
    )?);

    let spectrum = spectral::periodogram(series, config.sample_rate_hz)?;
    let band = Band::excluding_dc(spectrum.len());
    out.push(spectral::spectral_centroid(&spectrum, band)?);
    match spectral::spectral_skewness(&spectrum, band) {
        Ok(v) => out.push(v),
        Err(FeatureError::DegenerateSpectrum) => {
            *substituted += 1;
            out.push(F::zero());
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn extract_sensor<F: Scalar>(
    window: &Window<F>,
    config: &FeatureConfig,
    out: &mut Vec<F>,
    substituted: &mut usize,
) -> Result<(), FeatureError> {
    for axis in Axis::ALL {
        extract_axis(window.series(axis), config, out, substituted)?;
    }
    Ok(())
}

/// Compute the full feature vector for one paired window, Central sensor
/// first. Deterministic for identical input; rejects non-finite output.
pub fn extract_window_features<F: Scalar>(
    pair: &WindowPair<F>,
    config: &FeatureConfig,
) -> Result<FeatureVector<F>, FeatureError> {
    if pair.central.len() != pair.outer.len() {
        return Err(FeatureError::MismatchedPair {
            central: pair.central.len(),
            outer: pair.outer.len(),
        });
    }
    let schema_len = config.schema_for(pair.central.len())?.len();
    let mut values = Vec::with_capacity(schema_len);
    let mut substituted = 0usize;
    extract_sensor(&pair.central, config, &mut values, &mut substituted)?;
    extract_sensor(&pair.outer, config, &mut values, &mut substituted)?;
    debug_assert_eq!(values.len(), schema_len);

    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(FeatureError::NonFinite { index });
    }
    Ok(FeatureVector {
        values,
        experiment_id: pair.experiment_id().to_string(),
        label: pair.label(),
        substituted_skewness: substituted,
    })
}

/// Extract features for a whole corpus of window pairs, in input order.
///
/// All pairs must share the window length of the first pair so a single
/// schema describes every row.
pub fn extract_corpus<F: Scalar>(
    pairs: &[WindowPair<F>],
    config: &FeatureConfig,
) -> Result<(FeatureSchema, Vec<FeatureVector<F>>), FeatureError> {
    let first = pairs.first().ok_or(FeatureError::EmptySeries)?;
    let window_len = first.central.len();
    let schema = config.schema_for(window_len)?;

    let vectors: Result<Vec<_>, FeatureError> = pairs
        .par_iter()
        .map(|pair| {
            if pair.central.len() != window_len {
                return Err(FeatureError::MixedWindowLength {
                    expected: window_len,
                    got: pair.central.len(),
                });
            }
            extract_window_features(pair, config)
        })
        .collect();
    Ok((schema, vectors?))
}

/// Per-record Euclidean magnitude of a record stream — a derived channel
/// for inspection; not part of the feature vector.
pub fn magnitude_channel<F: Scalar>(records: &[VibrationRecord<F>]) -> Vec<(i64, F)> {
    records
        .iter()
        .map(|r| (r.timestamp_us, stats::magnitude(r.x, r.y, r.z)))
        .collect()
}

/// Schema sidecar JSON written next to a feature matrix: the descriptor
/// list, its fingerprint, and the extraction configuration that produced
/// it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaFile {
    pub fingerprint: String,
    pub config: FeatureConfig,
    pub schema: FeatureSchema,
}

#[derive(Debug, thiserror::Error)]
pub enum SchemaIoError {
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema file {path}: {reason}")]
    Format { path: std::path::PathBuf, reason: String },
}

impl SchemaFile {
    pub fn new(schema: FeatureSchema, config: FeatureConfig) -> Self {
        Self { fingerprint: schema.fingerprint(), config, schema }
    }

    pub fn write(&self, path: &std::path::Path) -> Result<(), SchemaIoError> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| SchemaIoError::Format { path: path.to_path_buf(), reason: e.to_string() })?;
        std::fs::write(path, json)
            .map_err(|source| SchemaIoError::Io { path: path.to_path_buf(), source })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, SchemaIoError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SchemaIoError::Io { path: path.to_path_buf(), source })?;
        let file: SchemaFile = serde_json::from_str(&text)
            .map_err(|e| SchemaIoError::Format { path: path.to_path_buf(), reason: e.to_string() })?;
        if file.fingerprint != file.schema.fingerprint() {
            return Err(SchemaIoError::Format {
                path: path.to_path_buf(),
                reason: "fingerprint does not match descriptor list".into(),
            });
        }
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Sensor, Window};

    fn window(sensor: Sensor, make: impl Fn(usize) -> f64) -> Window<f64> {
        let series: Vec<f64> = (0..800).map(&make).collect();
        Window {
            sensor,
            start_timestamp_us: 0,
            x_series: series.clone(),
            y_series: series.iter().map(|v| v * 0.5 + 0.1).collect(),
            z_series: series.iter().map(|v| 0.9 - v * 0.25).collect(),
            experiment_id: "t".into(),
            label: 0,
        }
    }

    fn pair(make: impl Fn(usize) -> f64 + Copy) -> WindowPair<f64> {
        WindowPair::new(window(Sensor::Central, make), window(Sensor::Outer, make))
    }

    fn wavy(i: usize) -> f64 {
        (2.0 * std::f64::consts::PI * 60.0 * i as f64 / 800.0).sin()
            + 0.1 * ((i * 7919 % 101) as f64 / 101.0 - 0.5)
    }

    #[test]
    fn default_vector_length_matches_schema() {
        let config = FeatureConfig::default();
        let fv = extract_window_features(&pair(wavy), &config).unwrap();
        assert_eq!(fv.values.len(), 4374);
        assert_eq!(config.schema_for(800).unwrap().len(), 4374);
    }

    #[test]
    fn extraction_is_deterministic() {
        let config = FeatureConfig::default();
        let a = extract_window_features(&pair(wavy), &config).unwrap();
        let b = extract_window_features(&pair(wavy), &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn corpus_order_is_stable_under_parallelism() {
        let config = FeatureConfig::default();
        let pairs: Vec<_> = (0..8)
            .map(|k| pair(move |i| wavy(i + 13 * k)))
            .collect();
        let (schema, rows) = extract_corpus(&pairs, &config).unwrap();
        assert_eq!(schema.len(), 4374);
        for (row, p) in rows.iter().zip(&pairs) {
            let direct = extract_window_features(p, &config).unwrap();
            assert_eq!(row, &direct);
        }
    }

    #[test]
    fn magnitude_channel_matches_eq() {
        let records = vec![VibrationRecord { sensor: Sensor::Central, timestamp_us: 5, x: 3.0, y: 4.0, z: 0.0 }];
        let channel = magnitude_channel(&records);
        assert_eq!(channel, vec![(5, 5.0)]);
    }
}
