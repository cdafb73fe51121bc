//! Seeded synthetic vibration generator.
//!
//! Stands in for recorded experiments in end-to-end tests: each experiment
//! is a sum of rotation-locked harmonics plus Gaussian noise, sampled at
//! the ingest rate, with one of three defect signatures applied:
//!
//! - `Crack`: periodic amplitude modulation at the rotation frequency. It
//!   raises the waveform peaks and plants modulation sidebands, while the
//!   total power barely moves — visible to peak-based time statistics and
//!   sharply visible to the STFT, nearly invisible to band energies.
//! - `Trim`: even-index harmonics scaled by an imbalance factor. The
//!   affected harmonics are small, so only the frequency grid resolves the
//!   change.
//! - `Scratch`: inflated broadband noise floor plus short high-frequency
//!   bursts — visible almost everywhere, strongest in dispersion and peak
//!   statistics.
//!
//! Everything is deterministic per (profile, seed); the corpus builder
//! applies small seeded per-run and per-blade-instance parameter jitter,
//! which is also what keeps single-feature defect signatures from being
//! trivially constant.

use std::fs::File;
use std::io::{BufWriter, Write as IoWrite};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{
    BladeCondition, ExperimentMeta, ManifestEntry, RecordFormat, Sensor, VibrationRecord,
    SENSOR_RANGE_G,
};
use crate::scalar::Scalar;
use crate::seed;

/// One rotation-locked sinusoid: frequency = `index` x rotation frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic<F> {
    pub index: u32,
    pub amplitude: F,
    pub phase: F,
}

/// Defect signature applied on top of the base harmonic profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DefectModifier<F> {
    None,
    Crack { modulation_depth: F },
    Trim { imbalance_factor: F },
    Scratch { noise_inflation: F },
}

/// Full description of one synthetic rotor state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotorProfile<F> {
    pub rotation_freq_hz: F,
    /// Harmonic content per axis (X, Y, Z).
    pub harmonics: [Vec<Harmonic<F>>; 3],
    /// Static offset per axis (gravity shows on Z).
    pub dc_offset: [F; 3],
    pub noise_sigma: F,
    pub defect: DefectModifier<F>,
    /// Outer/Central amplitude ratio for the vibration component; the
    /// outer sensor sits nearest the monitored blade.
    pub outer_gain: F,
}

/// Scratch bursts: short decaying high-frequency pulses.
const BURST_RATE_HZ: f64 = 6.0;
const BURST_LEN: usize = 8;
const BURST_CARRIER_HZ: f64 = 330.0;
const BURST_DECAY_SAMPLES: f64 = 3.0;
/// Burst amplitude as a multiple of the (inflated) noise sigma.
const BURST_SIGMA_FACTOR: f64 = 2.5;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("profile is invalid: {0}")]
    InvalidProfile(String),
    #[error("profile clips the ±{SENSOR_RANGE_G} g sensor range at sample {sample} ({value} g)")]
    ClippingProfile { sample: usize, value: f64 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl<F: Scalar> RotorProfile<F> {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.rotation_freq_hz <= F::zero() {
            return Err(SynthError::InvalidProfile("rotation frequency must be positive".into()));
        }
        if self.noise_sigma < F::zero() {
            return Err(SynthError::InvalidProfile("noise sigma must be non-negative".into()));
        }
        if self.outer_gain <= F::zero() {
            return Err(SynthError::InvalidProfile("outer gain must be positive".into()));
        }
        for axis_harmonics in &self.harmonics {
            for h in axis_harmonics {
                if h.amplitude < F::zero() {
                    return Err(SynthError::InvalidProfile(format!(
                        "harmonic {} has negative amplitude",
                        h.index
                    )));
                }
            }
        }
        let severity_ok = match self.defect {
            DefectModifier::Crack { modulation_depth } => modulation_depth >= F::zero(),
            DefectModifier::Trim { imbalance_factor } => imbalance_factor >= F::zero(),
            DefectModifier::Scratch { noise_inflation } => noise_inflation >= F::zero(),
            DefectModifier::None => true,
        };
        if !severity_ok {
            return Err(SynthError::InvalidProfile("defect severity must be non-negative".into()));
        }
        Ok(())
    }
}

/// Both sensors' record streams of one generated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentData<F> {
    pub central: Vec<VibrationRecord<F>>,
    pub outer: Vec<VibrationRecord<F>>,
}

/// Generate one experiment: `duration_s` seconds at `fs` Hz per sensor.
///
/// Byte-for-byte deterministic given (profile, seed). The generated samples
/// must stay within the sensor range or the profile is rejected.
pub fn generate_experiment<F: Scalar>(
    profile: &RotorProfile<F>,
    duration_s: f64,
    fs: u32,
    master_seed: u64,
) -> Result<ExperimentData<F>, SynthError> {
    profile.validate()?;
    let n = (duration_s * fs as f64).round() as usize;
    let dt = 1.0 / fs as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let f_rot = profile.rotation_freq_hz.as_f64();

    let (mod_depth, trim_factor, noise_inflation) = match profile.defect {
        DefectModifier::Crack { modulation_depth } => (modulation_depth.as_f64(), 1.0, 1.0),
        DefectModifier::Trim { imbalance_factor } => (0.0, imbalance_factor.as_f64(), 1.0),
        DefectModifier::Scratch { noise_inflation } => (0.0, 1.0, noise_inflation.as_f64()),
        DefectModifier::None => (0.0, 1.0, 1.0),
    };
    let sigma = profile.noise_sigma.as_f64() * noise_inflation;

    // Burst envelope, shared by all axes (a mechanical event shakes the
    // whole frame); only the Scratch defect produces any.
    let mut burst = vec![0.0f64; n];
    if matches!(profile.defect, DefectModifier::Scratch { .. }) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, 0xb));
        let p = BURST_RATE_HZ / fs as f64;
        let amp = BURST_SIGMA_FACTOR * sigma;
        let mut i = 0;
        while i < n {
            if rng.random::<f64>() < p {
                for j in 0..BURST_LEN.min(n - i) {
                    let t = j as f64 * dt;
                    burst[i + j] += amp
                        * (-(j as f64) / BURST_DECAY_SAMPLES).exp()
                        * (two_pi * BURST_CARRIER_HZ * t).cos();
                }
                i += BURST_LEN;
            } else {
                i += 1;
            }
        }
    }

    // Effective per-axis harmonic tables with the trim factor folded in.
    let axes: Vec<Vec<(f64, f64, f64)>> = profile
        .harmonics
        .iter()
        .map(|hs| {
            hs.iter()
                .map(|h| {
                    let scale = if h.index % 2 == 0 { trim_factor } else { 1.0 };
                    (h.index as f64 * f_rot, h.amplitude.as_f64() * scale, h.phase.as_f64())
                })
                .collect()
        })
        .collect();

    let mut noise_central = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, 1));
    let mut noise_outer = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, 2));
    let outer_gain = profile.outer_gain.as_f64();

    // Per-experiment phases of the slow amplitude wobble.
    let mut wobble_rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, 3));
    let wobble_common_phases: [f64; 2] =
        [wobble_rng.random_range(0.0..two_pi), wobble_rng.random_range(0.0..two_pi)];
    let wobble_axis_phases: [f64; 3] = [
        wobble_rng.random_range(0.0..two_pi),
        wobble_rng.random_range(0.0..two_pi),
        wobble_rng.random_range(0.0..two_pi),
    ];
    let noise_wobble_phases: [f64; 2] =
        [wobble_rng.random_range(0.0..two_pi), wobble_rng.random_range(0.0..two_pi)];

    // Structural rumble tones, scaled like the harmonics so a zeroed
    // profile stays silent.
    let harmonic_scale = {
        let sum: f64 = profile.harmonics.iter().flatten().map(|h| h.amplitude.as_f64()).sum();
        let count = profile.harmonics.iter().flatten().count();
        if count > 0 { sum / (count as f64 * 0.2) } else { 0.0 }
    };
    let mut rumble_rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, 4));
    let mut rumble_tones: Vec<(f64, f64, f64)> = Vec::new();
    for (lo, hi, base_amp) in RUMBLE_ZONES {
        for _ in 0..RUMBLE_TONES_PER_ZONE {
            let freq = rumble_rng.random_range(lo..hi);
            let phase = rumble_rng.random_range(0.0..two_pi);
            let amp = base_amp * rumble_rng.random_range(0.7..1.3) * harmonic_scale;
            rumble_tones.push((freq, amp, phase));
        }
    }
    let rumble_wobble_phase = rumble_rng.random_range(0.0..two_pi);

    let mut central = Vec::with_capacity(n);
    let mut outer = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 * dt;
        let envelope = 1.0 + mod_depth * (two_pi * f_rot * t).sin();
        let mut wobble_common = 1.0;
        for ((freq, depth), phase) in WOBBLE_COMMON.iter().zip(wobble_common_phases) {
            wobble_common += depth * (two_pi * freq * t + phase).sin();
        }
        let mut sigma_t = sigma;
        for ((freq, depth), phase) in NOISE_WOBBLE.iter().zip(noise_wobble_phases) {
            sigma_t += sigma * depth * (two_pi * freq * t + phase).sin();
        }
        let rumble_level =
            1.0 + RUMBLE_WOBBLE.1 * (two_pi * RUMBLE_WOBBLE.0 * t + rumble_wobble_phase).sin();
        let mut rumble = 0.0;
        for &(freq, amp, phase) in &rumble_tones {
            rumble += amp * (two_pi * freq * t + phase).sin();
        }
        rumble *= rumble_level;
        let timestamp_us = (i as i64) * 1_000_000 / fs as i64;
        let mut c = [0.0f64; 3];
        let mut o = [0.0f64; 3];
        for (a, table) in axes.iter().enumerate() {
            let mut vib = 0.0;
            for &(freq, amp, phase) in table {
                vib += amp * (two_pi * freq * t + phase).sin();
            }
            let wobble = wobble_common
                + WOBBLE_AXIS.1 * (two_pi * WOBBLE_AXIS.0 * t + wobble_axis_phases[a]).sin();
            vib = vib * envelope * wobble + rumble * RUMBLE_AXIS_GAIN[a] + burst[i];
            let dc = profile.dc_offset[a].as_f64();
            let zc: f64 = StandardNormal.sample(&mut noise_central);
            let zo: f64 = StandardNormal.sample(&mut noise_outer);
            c[a] = dc + vib + sigma_t * zc;
            o[a] = dc + outer_gain * vib + sigma_t * zo;
            for &v in [c[a], o[a]].iter() {
                if v.abs() > SENSOR_RANGE_G {
                    return Err(SynthError::ClippingProfile { sample: i, value: v });
                }
            }
        }
        central.push(VibrationRecord {
            sensor: Sensor::Central,
            timestamp_us,
            x: F::of(c[0]),
            y: F::of(c[1]),
            z: F::of(c[2]),
        });
        outer.push(VibrationRecord {
            sensor: Sensor::Outer,
            timestamp_us,
            x: F::of(o[0]),
            y: F::of(o[1]),
            z: F::of(o[2]),
        });
    }
    Ok(ExperimentData { central, outer })
}

/// Signal-level knobs for corpus generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound = "F: Scalar")]
pub struct SnrConfig<F> {
    /// Base Gaussian noise sigma in g.
    pub noise_sigma: F,
    /// Multiplier on every harmonic amplitude; 0 produces noise-only data.
    pub harmonic_gain: F,
}

impl<F: Scalar> Default for SnrConfig<F> {
    fn default() -> Self {
        Self { noise_sigma: F::of(0.05), harmonic_gain: F::one() }
    }
}

/// Corpus-level generation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound = "F: Scalar")]
pub struct CorpusConfig<F> {
    pub duration_s: f64,
    pub sample_rate_hz: u32,
    pub snr: SnrConfig<F>,
}

impl<F: Scalar> Default for CorpusConfig<F> {
    fn default() -> Self {
        Self { duration_s: 60.0, sample_rate_hz: 800, snr: SnrConfig::default() }
    }
}

/// Baseline (normal) rotor profile at the given signal level.
///
/// Large harmonics sit on odd multiples of the rotation frequency, small
/// ones on the even multiples the Trim defect scales. No energy sits at
/// 1x rotation, so crack modulation sidebands always land next to an
/// existing harmonic rather than at DC or in an empty band.
pub fn baseline_profile<F: Scalar>(snr: &SnrConfig<F>) -> RotorProfile<F> {
    let g = snr.harmonic_gain.as_f64();
    let h = |index: u32, amplitude: f64, phase: f64| Harmonic {
        index,
        amplitude: F::of(amplitude * g),
        phase: F::of(phase),
    };
    RotorProfile {
        rotation_freq_hz: F::of(58.7),
        harmonics: [
            vec![h(2, 0.035, 1.1), h(3, 0.56, 2.3), h(4, 0.030, 0.7), h(5, 0.34, 0.2), h(6, 0.022, 1.9)],
            vec![h(2, 0.028, 2.0), h(3, 0.44, 0.4), h(4, 0.024, 1.5), h(5, 0.27, 2.6), h(6, 0.018, 0.8)],
            vec![h(3, 0.28, 0.5), h(5, 0.17, 1.7)],
        ],
        dc_offset: [F::zero(), F::zero(), F::of(0.98)],
        noise_sigma: snr.noise_sigma,
        defect: DefectModifier::None,
        outer_gain: F::of(1.25),
    }
}

/// Default defect severities before per-instance jitter.
const CRACK_DEPTH: f64 = 0.18;
const TRIM_FACTOR: f64 = 0.20;
const SCRATCH_INFLATION: f64 = 10.0;

/// Slow multiplicative drift of the vibration level: rotors do not hold a
/// perfectly steady amplitude, so consecutive windows of one experiment
/// differ by a few percent. Two incommensurate common tones plus one
/// per-axis tone, with per-experiment random phases.
const WOBBLE_COMMON: [(f64, f64); 2] = [(0.131, 0.04), (0.379, 0.025)];
const WOBBLE_AXIS: (f64, f64) = (0.211, 0.02);
/// The noise floor drifts too; this is what keeps otherwise-quiet
/// frequency bands from acting as clean defect detectors.
const NOISE_WOBBLE: [(f64, f64); 2] = [(0.097, 0.13), (0.269, 0.07)];

/// Broadband structural resonances: clusters of low-amplitude tones in the
/// frequency ranges no rotation harmonic reaches. Their frequencies and
/// phases are drawn per experiment and their level drifts deeply, so the
/// coarse band energies covering them fluctuate run to run and window to
/// window.
const RUMBLE_ZONES: [(f64, f64, f64); 3] =
    [(62.0, 94.0, 0.05), (150.0, 166.0, 0.06), (306.0, 338.0, 0.09)];
const RUMBLE_TONES_PER_ZONE: usize = 2;
const RUMBLE_AXIS_GAIN: [f64; 3] = [0.4, 1.0, 0.8];
const RUMBLE_WOBBLE: (f64, f64) = (0.173, 0.30);

fn defect_for<F: Scalar>(condition: BladeCondition, severity_scale: f64) -> DefectModifier<F> {
    match condition {
        BladeCondition::Normal => DefectModifier::None,
        BladeCondition::DefectType1 => {
            DefectModifier::Crack { modulation_depth: F::of(CRACK_DEPTH * severity_scale) }
        }
        BladeCondition::DefectType2 => {
            DefectModifier::Trim { imbalance_factor: F::of(TRIM_FACTOR * severity_scale) }
        }
        BladeCondition::DefectType3 => {
            DefectModifier::Scratch { noise_inflation: F::of(SCRATCH_INFLATION * severity_scale) }
        }
    }
}

fn condition_slug(condition: BladeCondition) -> &'static str {
    match condition {
        BladeCondition::Normal => "normal",
        BladeCondition::DefectType1 => "crack",
        BladeCondition::DefectType2 => "trim",
        BladeCondition::DefectType3 => "scratch",
    }
}

/// Per-run parameter jitter: rotors never repeat themselves exactly.
const FREQ_JITTER: f64 = 0.02;
const GAIN_JITTER: f64 = 0.10;
const PHASE_DRIFT: f64 = 0.30;
const INSTANCE_JITTER: f64 = 0.10;

fn jittered_profile<F: Scalar>(
    base: &RotorProfile<F>,
    condition: BladeCondition,
    instance: Option<u8>,
    master_seed: u64,
    run_stream: u64,
) -> RotorProfile<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, run_stream));
    let freq_scale = 1.0 + rng.random_range(-FREQ_JITTER..FREQ_JITTER);
    let gain = 1.0 + rng.random_range(-GAIN_JITTER..GAIN_JITTER);

    let mut profile = base.clone();
    profile.rotation_freq_hz = F::of(base.rotation_freq_hz.as_f64() * freq_scale);
    for axis_harmonics in &mut profile.harmonics {
        for h in axis_harmonics.iter_mut() {
            let drift = rng.random_range(-PHASE_DRIFT..PHASE_DRIFT);
            h.amplitude = F::of(h.amplitude.as_f64() * gain);
            h.phase = F::of(h.phase.as_f64() + drift);
        }
    }

    // Blade instances differ by a fixed severity offset shared by all of
    // that instance's runs.
    let severity = match instance {
        Some(inst) => {
            let stream = 0x5000 + (condition_slug(condition).len() as u64) * 16 + inst as u64;
            let mut inst_rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, stream));
            1.0 + inst_rng.random_range(-INSTANCE_JITTER..INSTANCE_JITTER)
        }
        None => 1.0,
    };
    profile.defect = defect_for(condition, severity);
    profile
}

/// Generate the paper-shaped corpus in memory: 8 normal experiments plus
/// 3 runs for each of 6 defective blades (2 instances x 3 defect types).
pub fn generate_paper_shaped_corpus<F: Scalar>(
    master_seed: u64,
    config: &CorpusConfig<F>,
) -> Result<Vec<(ExperimentMeta, ExperimentData<F>)>, SynthError> {
    let base = baseline_profile::<F>(&config.snr);
    let mut specs: Vec<(String, BladeCondition, Option<u8>)> = Vec::with_capacity(26);
    for run in 1..=8 {
        specs.push((format!("normal_run{run}"), BladeCondition::Normal, None));
    }
    for condition in [BladeCondition::DefectType1, BladeCondition::DefectType2, BladeCondition::DefectType3] {
        for instance in [1u8, 2] {
            for run in 1..=3 {
                specs.push((
                    format!("{}{}_run{run}", condition_slug(condition), instance),
                    condition,
                    Some(instance),
                ));
            }
        }
    }

    specs
        .into_par_iter()
        .enumerate()
        .map(|(idx, (id, condition, instance))| {
            let profile = jittered_profile(&base, condition, instance, master_seed, idx as u64);
            let data = generate_experiment(
                &profile,
                config.duration_s,
                config.sample_rate_hz,
                seed::derive(master_seed, 0x9000 + idx as u64),
            )?;
            let mut meta = ExperimentMeta::new(id, condition, instance);
            meta.duration_s = config.duration_s;
            Ok((meta, data))
        })
        .collect()
}

/// Write one experiment's records (both sensors, interleaved by sample) in
/// the ingest CSV format.
pub fn write_experiment_csv<F: Scalar>(
    path: &Path,
    data: &ExperimentData<F>,
    format: &RecordFormat,
) -> Result<(), SynthError> {
    let io_err = |source| SynthError::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    if format.has_header {
        writeln!(w, "{}", format.header()).map_err(io_err)?;
    }
    let n = data.central.len().max(data.outer.len());
    for i in 0..n {
        if let Some(r) = data.central.get(i) {
            writeln!(w, "{}", format.format_record(r)).map_err(io_err)?;
        }
        if let Some(r) = data.outer.get(i) {
            writeln!(w, "{}", format.format_record(r)).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

/// Generate the paper-shaped corpus as files plus a manifest JSON that
/// `ingest::load_manifest` accepts. Returns the manifest path.
pub fn write_corpus<F: Scalar>(
    out_dir: &Path,
    master_seed: u64,
    config: &CorpusConfig<F>,
) -> Result<PathBuf, SynthError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|source| SynthError::Io { path: out_dir.to_path_buf(), source })?;
    let experiments = generate_paper_shaped_corpus::<F>(master_seed, config)?;
    let format = RecordFormat::default();

    let mut entries = Vec::with_capacity(experiments.len());
    for (meta, data) in &experiments {
        let file_name = format!("{}.csv", meta.experiment_id);
        write_experiment_csv(&out_dir.join(&file_name), data, &format)?;
        entries.push(ManifestEntry {
            path: file_name,
            experiment_id: meta.experiment_id.clone(),
            blade_condition: meta.blade_condition,
            blade_instance: meta.blade_instance,
        });
    }

    let manifest_path = out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&entries).expect("manifest serializes");
    std::fs::write(&manifest_path, json)
        .map_err(|source| SynthError::Io { path: manifest_path.clone(), source })?;
    Ok(manifest_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet_profile() -> RotorProfile<f64> {
        RotorProfile {
            rotation_freq_hz: 50.0,
            harmonics: [vec![], vec![], vec![]],
            dc_offset: [0.0; 3],
            noise_sigma: 0.0,
            defect: DefectModifier::None,
            outer_gain: 1.0,
        }
    }

    #[test]
    fn zero_profile_generates_zero_records() {
        let data = generate_experiment(&quiet_profile(), 0.1, 800, 7).unwrap();
        assert_eq!(data.central.len(), 80);
        assert!(data.central.iter().all(|r| r.x == 0.0 && r.y == 0.0 && r.z == 0.0));
        assert!(data.outer.iter().all(|r| r.x == 0.0 && r.y == 0.0 && r.z == 0.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let snr = SnrConfig::default();
        let profile = baseline_profile::<f64>(&snr);
        let a = generate_experiment(&profile, 0.5, 800, 42).unwrap();
        let b = generate_experiment(&profile, 0.5, 800, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_experiment(&profile, 0.5, 800, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_harmonic_peaks_at_its_bin() {
        // 50 Hz line, amplitude 1 g; the 800-sample window puts 50 Hz
        // exactly in bin 50. Checked against a direct DFT argmax.
        let mut profile = quiet_profile();
        profile.harmonics[0] = vec![Harmonic { index: 1, amplitude: 1.0, phase: 0.3 }];
        let data = generate_experiment(&profile, 1.0, 800, 3).unwrap();
        let series: Vec<f64> = data.central.iter().map(|r| r.x).collect();
        let mut best = (0usize, -1.0f64);
        for k in 0..=400 {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (n, &v) in series.iter().enumerate() {
                let ang = 2.0 * std::f64::consts::PI * k as f64 * n as f64 / 800.0;
                re += v * ang.cos();
                im -= v * ang.sin();
            }
            let mag = (re * re + im * im).sqrt();
            if mag > best.1 {
                best = (k, mag);
            }
        }
        assert_eq!(best.0, 50);
    }

    #[test]
    fn clipping_profiles_rejected() {
        let mut profile = quiet_profile();
        profile.harmonics[1] = vec![Harmonic { index: 1, amplitude: 9.5, phase: 0.0 }];
        let err = generate_experiment(&profile, 0.05, 800, 0).unwrap_err();
        assert!(matches!(err, SynthError::ClippingProfile { .. }));
    }

    #[test]
    fn outer_sensor_scales_vibration_not_gravity() {
        let mut profile = quiet_profile();
        profile.outer_gain = 2.0;
        profile.dc_offset = [0.0, 0.0, 1.0];
        profile.harmonics[0] = vec![Harmonic { index: 1, amplitude: 0.5, phase: 0.0 }];
        let data = generate_experiment(&profile, 0.1, 800, 1).unwrap();
        for (c, o) in data.central.iter().zip(&data.outer) {
            assert!((o.x - 2.0 * c.x).abs() < 1e-12);
            assert!((o.z - 1.0).abs() < 1e-12 && (c.z - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn corpus_has_paper_shape() {
        let config = CorpusConfig { duration_s: 0.5, ..CorpusConfig::default() };
        let corpus = generate_paper_shaped_corpus::<f64>(5, &config).unwrap();
        assert_eq!(corpus.len(), 26);
        let normal = corpus.iter().filter(|(m, _)| m.blade_condition == BladeCondition::Normal).count();
        assert_eq!(normal, 8);
        for (meta, data) in &corpus {
            meta.validate().unwrap();
            assert_eq!(data.central.len(), 400);
            assert_eq!(data.outer.len(), 400);
        }
        // Distinct ids.
        let mut ids: Vec<_> = corpus.iter().map(|(m, _)| m.experiment_id.clone()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 26);
    }

    #[test]
    fn corpus_files_are_reproducible() {
        let dir = std::env::temp_dir().join(format!("rv-synth-{}", std::process::id()));
        let config = CorpusConfig { duration_s: 0.1, ..CorpusConfig::default() };
        let m1 = write_corpus::<f64>(&dir.join("a"), 11, &config).unwrap();
        let m2 = write_corpus::<f64>(&dir.join("b"), 11, &config).unwrap();
        let read = |m: &Path, name: &str| std::fs::read(m.parent().unwrap().join(name)).unwrap();
        assert_eq!(read(&m1, "normal_run1.csv"), read(&m2, "normal_run1.csv"));
        assert_eq!(read(&m1, "scratch2_run3.csv"), read(&m2, "scratch2_run3.csv"));
        assert_eq!(
            std::fs::read(&m1).unwrap(),
            std::fs::read(&m2).unwrap(),
            "manifests should match byte-for-byte"
        );
        std::fs::remove_dir_all(&dir).ok();
    }
}
