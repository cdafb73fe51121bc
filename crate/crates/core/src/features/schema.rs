//! Feature schema: an ordered descriptor per feature-vector position.
//!
//! The layout is multiplicative: per axis `[4 time-domain] ++ [frames*bins
//! STFT] ++ [2^levels wavelet] ++ [centroid] ++ [skewness]`, three axes per
//! sensor, Central then Outer. Every descriptor carries a unique name used
//! in CSV headers, reports, and model fingerprints.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ingest::{Axis, Sensor};

/// Family a feature belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureFamily {
    TimeDomain,
    Stft,
    Wavelet,
    SpectralCentroid,
    FrequencySkewness,
}

impl FeatureFamily {
    pub const ALL: [FeatureFamily; 5] = [
        FeatureFamily::TimeDomain,
        FeatureFamily::Stft,
        FeatureFamily::Wavelet,
        FeatureFamily::SpectralCentroid,
        FeatureFamily::FrequencySkewness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureFamily::TimeDomain => "time_domain",
            FeatureFamily::Stft => "stft",
            FeatureFamily::Wavelet => "wavelet",
            FeatureFamily::SpectralCentroid => "spectral_centroid",
            FeatureFamily::FrequencySkewness => "frequency_skewness",
        }
    }

    /// Short label used in importance reports.
    pub fn short_label(self) -> &'static str {
        match self {
            FeatureFamily::TimeDomain => "Time",
            FeatureFamily::Stft => "STFT",
            FeatureFamily::Wavelet => "Wavelet",
            FeatureFamily::SpectralCentroid => "SC",
            FeatureFamily::FrequencySkewness => "FS",
        }
    }
}

impl fmt::Display for FeatureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "time" | "time_domain" | "time-domain" => Ok(FeatureFamily::TimeDomain),
            "stft" => Ok(FeatureFamily::Stft),
            "wavelet" => Ok(FeatureFamily::Wavelet),
            "sc" | "spectral_centroid" | "spectral-centroid" => Ok(FeatureFamily::SpectralCentroid),
            "fs" | "frequency_skewness" | "frequency-skewness" => Ok(FeatureFamily::FrequencySkewness),
            other => Err(format!("unknown feature family '{other}'")),
        }
    }
}

/// Position metadata for one feature-vector slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub sensor: Sensor,
    pub axis: Axis,
    pub family: FeatureFamily,
    pub index_within_family: usize,
    pub name: String,
}

/// Names of the four time-domain slots, in vector order.
pub const TIME_FEATURE_NAMES: [&str; 4] = ["amplitude", "mean", "std", "entropy"];

/// Ordered feature descriptor list for one window pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    features: Vec<FeatureDescriptor>,
    stft_frames: usize,
    stft_bins: usize,
    wavelet_nodes: usize,
}

impl FeatureSchema {
    /// Build the schema for given STFT grid and wavelet node counts.
    pub fn new(stft_frames: usize, stft_bins: usize, wavelet_nodes: usize) -> Self {
        let mut features = Vec::new();
        for sensor in [Sensor::Central, Sensor::Outer] {
            for axis in Axis::ALL {
                let prefix = format!("{}_{}", sensor.name(), axis.name());
                for (i, stat) in TIME_FEATURE_NAMES.iter().enumerate() {
                    features.push(FeatureDescriptor {
                        sensor,
                        axis,
                        family: FeatureFamily::TimeDomain,
                        index_within_family: i,
                        name: format!("{prefix}_{stat}"),
                    });
                }
                for m in 0..stft_frames {
                    for b in 0..stft_bins {
                        features.push(FeatureDescriptor {
                            sensor,
                            axis,
                            family: FeatureFamily::Stft,
                            index_within_family: m * stft_bins + b,
                            name: format!("{prefix}_stft_f{m}_b{b}"),
                        });
                    }
                }
                for j in 0..wavelet_nodes {
                    features.push(FeatureDescriptor {
                        sensor,
                        axis,
                        family: FeatureFamily::Wavelet,
                        index_within_family: j,
                        name: format!("{prefix}_wp{j}"),
                    });
                }
                features.push(FeatureDescriptor {
                    sensor,
                    axis,
                    family: FeatureFamily::SpectralCentroid,
                    index_within_family: 0,
                    name: format!("{prefix}_centroid"),
                });
                features.push(FeatureDescriptor {
                    sensor,
                    axis,
                    family: FeatureFamily::FrequencySkewness,
                    index_within_family: 0,
                    name: format!("{prefix}_skewness"),
                });
            }
        }
        Self { features, stft_frames, stft_bins, wavelet_nodes }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn descriptors(&self) -> &[FeatureDescriptor] {
        &self.features
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|d| d.name.as_str())
    }

    pub fn per_axis_len(&self) -> usize {
        4 + self.stft_frames * self.stft_bins + self.wavelet_nodes + 1 + 1
    }

    pub fn per_sensor_len(&self) -> usize {
        3 * self.per_axis_len()
    }

    /// Column indices whose descriptor matches `family`, across both
    /// sensors and all axes.
    pub fn family_columns(&self, family: FeatureFamily) -> Vec<usize> {
        self.features
            .iter()
            .enumerate()
            .filter(|(_, d)| d.family == family)
            .map(|(i, _)| i)
            .collect()
    }

    /// Schema restricted to the given column indices (in that order).
    pub fn select(&self, columns: &[usize]) -> FeatureSchema {
        let features = columns.iter().map(|&i| self.features[i].clone()).collect();
        FeatureSchema {
            features,
            stft_frames: self.stft_frames,
            stft_bins: self.stft_bins,
            wavelet_nodes: self.wavelet_nodes,
        }
    }

    /// FNV-1a hash of the ordered feature names; models embed it to refuse
    /// mismatched feature spaces.
    pub fn fingerprint(&self) -> String {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for name in self.names() {
            for byte in name.bytes().chain(std::iter::once(b'\n')) {
                hash ^= u64::from(byte);
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        format!("{hash:016x}")
    }
}

/// A family's feature count expanded across axes and sensors, mirroring the
/// per-axis / per-sensor / per-record accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyAccounting {
    pub per_axis: usize,
    pub per_sensor: usize,
    pub per_record: usize,
}

impl FamilyAccounting {
    pub fn from_per_axis(per_axis: usize) -> Self {
        Self { per_axis, per_sensor: 3 * per_axis, per_record: 6 * per_axis }
    }
}
