//! Raw experiment-log ingestion.
//!
//! Experiment logs are CSV files with one vibration record per row
//! (`sensor,timestamp,x,y,z`). This module parses them into validated
//! records, groups each sensor's stream into fixed-size windows, and pairs
//! the windows of the two sensors into the corpus rows that feature
//! extraction consumes.
//!
//! Records that fail validation (range, arity, sensor token, timestamp
//! order) abort the experiment load with the offending line number rather
//! than being dropped, since silent drops would bias downstream statistics.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Accelerometer sampling rate in Hz.
pub const SAMPLE_RATE_HZ: u32 = 800;
/// Symmetric accelerometer range in g.
pub const SENSOR_RANGE_G: f64 = 8.0;
/// Default window length: one second of samples.
pub const DEFAULT_WINDOW_SIZE: usize = 800;

/// Label value for windows from a normal blade.
pub const LABEL_NORMAL: u8 = 0;
/// Label value for windows from any defective blade.
pub const LABEL_DEFECTIVE: u8 = 1;

/// Which of the two mounted accelerometers produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sensor {
    /// Mounted at the drone hub.
    Central,
    /// Mounted on the wing arm nearest the monitored blade.
    Outer,
}

impl Sensor {
    pub fn name(self) -> &'static str {
        match self {
            Sensor::Central => "central",
            Sensor::Outer => "outer",
        }
    }

    fn from_token(token: &str) -> Option<Self> {
        match token.trim().to_ascii_lowercase().as_str() {
            "central" => Some(Sensor::Central),
            "outer" => Some(Sensor::Outer),
            _ => None,
        }
    }
}

/// Accelerometer axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// Physical condition of the blade under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BladeCondition {
    Normal,
    /// Crack at one end of the blade.
    DefectType1,
    /// One end trimmed.
    DefectType2,
    /// Scratched and misshaped on one side.
    DefectType3,
}

impl BladeCondition {
    pub fn is_defective(self) -> bool {
        !matches!(self, BladeCondition::Normal)
    }
}

/// One timestamped tri-axial sample from one sensor.
///
/// Invariants: every axis value lies within the ±8 g sensor range, and
/// timestamps are non-decreasing within one sensor's stream (enforced at
/// parse/load time, not here).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VibrationRecord<F> {
    pub sensor: Sensor,
    /// Microseconds since experiment start.
    pub timestamp_us: i64,
    pub x: F,
    pub y: F,
    pub z: F,
}

impl<F: Scalar> VibrationRecord<F> {
    pub fn axis_value(&self, axis: Axis) -> F {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }
}

/// Metadata describing one recording experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMeta {
    pub experiment_id: String,
    pub blade_condition: BladeCondition,
    /// 1 or 2 for defective conditions; irrelevant for Normal.
    pub blade_instance: Option<u8>,
    /// Nominal recording duration in seconds.
    pub duration_s: f64,
}

impl ExperimentMeta {
    pub fn new(
        experiment_id: impl Into<String>,
        blade_condition: BladeCondition,
        blade_instance: Option<u8>,
    ) -> Self {
        Self {
            experiment_id: experiment_id.into(),
            blade_condition,
            blade_instance,
            duration_s: 60.0,
        }
    }

    /// Binary window label for this experiment.
    pub fn label(&self) -> u8 {
        if self.blade_condition.is_defective() {
            LABEL_DEFECTIVE
        } else {
            LABEL_NORMAL
        }
    }

    /// Defective conditions must name blade instance 1 or 2.
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.blade_condition.is_defective() && !matches!(self.blade_instance, Some(1) | Some(2)) {
            return Err(IngestError::InvalidBladeInstance {
                condition: self.blade_condition,
                instance: self.blade_instance,
            });
        }
        Ok(())
    }
}

/// One second (by default) of consecutive samples from one sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Window<F> {
    pub sensor: Sensor,
    pub start_timestamp_us: i64,
    pub x_series: Vec<F>,
    pub y_series: Vec<F>,
    pub z_series: Vec<F>,
    pub experiment_id: String,
    pub label: u8,
}

impl<F: Scalar> Window<F> {
    pub fn len(&self) -> usize {
        self.x_series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_series.is_empty()
    }

    pub fn series(&self, axis: Axis) -> &[F] {
        match axis {
            Axis::X => &self.x_series,
            Axis::Y => &self.y_series,
            Axis::Z => &self.z_series,
        }
    }
}

/// The k-th Central window paired with the k-th Outer window of the same
/// experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPair<F> {
    pub central: Window<F>,
    pub outer: Window<F>,
}

impl<F: Scalar> WindowPair<F> {
    pub fn new(central: Window<F>, outer: Window<F>) -> Self {
        assert_eq!(central.sensor, Sensor::Central);
        assert_eq!(outer.sensor, Sensor::Outer);
        assert_eq!(central.experiment_id, outer.experiment_id, "cross-experiment pair");
        assert_eq!(central.label, outer.label);
        Self { central, outer }
    }

    pub fn experiment_id(&self) -> &str {
        &self.central.experiment_id
    }

    pub fn label(&self) -> u8 {
        self.central.label
    }
}

/// Textual layout of a record row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordFormat {
    pub has_header: bool,
    pub delimiter: char,
}

impl Default for RecordFormat {
    fn default() -> Self {
        Self { has_header: true, delimiter: ',' }
    }
}

impl RecordFormat {
    pub fn header(&self) -> String {
        ["sensor", "timestamp", "x", "y", "z"].join(&self.delimiter.to_string())
    }

    /// Render a record as one CSV row. `parse_record_line` is its inverse on
    /// valid records.
    pub fn format_record<F: Scalar>(&self, record: &VibrationRecord<F>) -> String {
        let d = self.delimiter;
        format!(
            "{}{d}{}{d}{}{d}{}{d}{}",
            match record.sensor {
                Sensor::Central => "Central",
                Sensor::Outer => "Outer",
            },
            record.timestamp_us,
            record.x,
            record.y,
            record.z,
        )
    }
}

/// Why a single record line failed to parse.
#[derive(Debug, Error, PartialEq)]
pub enum RecordParseError {
    #[error("malformed record ({0})")]
    MalformedLine(String),
    #[error("unknown sensor token '{0}'")]
    UnknownSensor(String),
    #[error("{axis} value {value} exceeds the ±{SENSOR_RANGE_G} g sensor range")]
    RangeViolation { axis: char, value: f64 },
}

/// Ingest failure, with file/line context where applicable.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: RecordParseError,
    },
    #[error("{path}:{line}: timestamp {timestamp} decreases within the {sensor:?} stream")]
    NonMonotonicTimestamp { path: PathBuf, line: usize, sensor: Sensor, timestamp: i64 },
    #[error("experiment '{experiment_id}' has no records from the {sensor:?} sensor")]
    MissingSensor { experiment_id: String, sensor: Sensor },
    #[error("{condition:?} requires blade instance 1 or 2, got {instance:?}")]
    InvalidBladeInstance { condition: BladeCondition, instance: Option<u8> },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },
}

/// Parse one CSV row into a validated record.
///
/// The sensor token is matched case-insensitively; axis values must be
/// finite and within the ±8 g range (violations are errors, not clamps).
pub fn parse_record_line<F: Scalar>(
    line: &str,
    format: &RecordFormat,
) -> Result<VibrationRecord<F>, RecordParseError> {
    let fields: Vec<&str> = line.trim_end_matches(['\r', '\n']).split(format.delimiter).collect();
    if fields.len() != 5 {
        return Err(RecordParseError::MalformedLine(format!(
            "expected 5 fields, found {}",
            fields.len()
        )));
    }

    let sensor = Sensor::from_token(fields[0])
        .ok_or_else(|| RecordParseError::UnknownSensor(fields[0].trim().to_string()))?;

    let timestamp_us: i64 = fields[1]
        .trim()
        .parse()
        .map_err(|_| RecordParseError::MalformedLine(format!("bad timestamp '{}'", fields[1].trim())))?;
    if timestamp_us < 0 {
        return Err(RecordParseError::MalformedLine(format!(
            "negative timestamp {timestamp_us}"
        )));
    }

    let mut values = [F::zero(); 3];
    for (slot, (field, axis)) in values.iter_mut().zip(fields[2..].iter().zip(['x', 'y', 'z'])) {
        let v: F = field
            .trim()
            .parse()
            .map_err(|_| RecordParseError::MalformedLine(format!("bad {axis} value '{}'", field.trim())))?;
        if !v.is_finite() {
            return Err(RecordParseError::MalformedLine(format!("non-finite {axis} value")));
        }
        if v.abs() > F::of(SENSOR_RANGE_G) {
            return Err(RecordParseError::RangeViolation { axis, value: v.as_f64() });
        }
        *slot = v;
    }

    Ok(VibrationRecord { sensor, timestamp_us, x: values[0], y: values[1], z: values[2] })
}

/// Both sensors' record streams from one experiment file.
#[derive(Debug, Clone)]
pub struct ExperimentStreams<F> {
    pub central: Vec<VibrationRecord<F>>,
    pub outer: Vec<VibrationRecord<F>>,
}

impl<F> ExperimentStreams<F> {
    /// (central, outer) record counts.
    pub fn counts(&self) -> (usize, usize) {
        (self.central.len(), self.outer.len())
    }
}

/// Load an experiment file and partition its records by sensor.
///
/// Fails fast on the first invalid line, reporting its line number.
/// Timestamps must be non-decreasing within each sensor's stream.
pub fn load_experiment<F: Scalar>(
    path: &Path,
    meta: &ExperimentMeta,
    format: &RecordFormat,
) -> Result<ExperimentStreams<F>, IngestError> {
    meta.validate()?;
    let file = File::open(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    let reader = BufReader::new(file);

    let mut streams = ExperimentStreams { central: Vec::new(), outer: Vec::new() };
    let mut first_data_line = true;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        // Header row is optional; recognize it by its first field.
        if first_data_line {
            first_data_line = false;
            let head = line.split(format.delimiter).next().unwrap_or("").trim();
            if head.eq_ignore_ascii_case("sensor") {
                continue;
            }
        }
        let record = parse_record_line::<F>(&line, format).map_err(|source| IngestError::Parse {
            path: path.to_path_buf(),
            line: line_no,
            source,
        })?;
        let stream = match record.sensor {
            Sensor::Central => &mut streams.central,
            Sensor::Outer => &mut streams.outer,
        };
        if let Some(prev) = stream.last() {
            if record.timestamp_us < prev.timestamp_us {
                return Err(IngestError::NonMonotonicTimestamp {
                    path: path.to_path_buf(),
                    line: line_no,
                    sensor: record.sensor,
                    timestamp: record.timestamp_us,
                });
            }
        }
        stream.push(record);
    }
    Ok(streams)
}

/// Group one sensor's records into consecutive non-overlapping windows of
/// exactly `window_size` samples. A trailing partial group is discarded.
pub fn window_stream<F: Scalar>(
    records: &[VibrationRecord<F>],
    window_size: usize,
    meta: &ExperimentMeta,
) -> Vec<Window<F>> {
    assert!(window_size >= 2, "window size must be at least 2");
    let label = meta.label();
    records
        .chunks_exact(window_size)
        .map(|chunk| {
            debug_assert!(chunk.iter().all(|r| r.sensor == chunk[0].sensor));
            Window {
                sensor: chunk[0].sensor,
                start_timestamp_us: chunk[0].timestamp_us,
                x_series: chunk.iter().map(|r| r.x).collect(),
                y_series: chunk.iter().map(|r| r.y).collect(),
                z_series: chunk.iter().map(|r| r.z).collect(),
                experiment_id: meta.experiment_id.clone(),
                label,
            }
        })
        .collect()
}

/// Window both sensor streams of one experiment and pair them by index
/// (k-th Central with k-th Outer); the pair count is the minimum of the
/// two window counts.
pub fn pair_windows<F: Scalar>(
    streams: &ExperimentStreams<F>,
    meta: &ExperimentMeta,
    window_size: usize,
) -> Result<Vec<WindowPair<F>>, IngestError> {
    for (records, sensor) in [(&streams.central, Sensor::Central), (&streams.outer, Sensor::Outer)] {
        if records.is_empty() {
            return Err(IngestError::MissingSensor {
                experiment_id: meta.experiment_id.clone(),
                sensor,
            });
        }
    }
    let central = window_stream(&streams.central, window_size, meta);
    let outer = window_stream(&streams.outer, window_size, meta);
    Ok(central
        .into_iter()
        .zip(outer)
        .map(|(c, o)| WindowPair::new(c, o))
        .collect())
}

/// Load every experiment, window both sensor streams, and pair windows by
/// index. Experiments load concurrently; output order follows the input
/// list.
pub fn assemble_corpus<F: Scalar>(
    experiments: &[(PathBuf, ExperimentMeta)],
    format: &RecordFormat,
    window_size: usize,
) -> Result<Vec<WindowPair<F>>, IngestError> {
    let per_experiment: Vec<Result<Vec<WindowPair<F>>, IngestError>> = experiments
        .par_iter()
        .map(|(path, meta)| {
            let streams = load_experiment::<F>(path, meta, format)?;
            pair_windows(&streams, meta, window_size)
        })
        .collect();

    let mut corpus = Vec::new();
    for result in per_experiment {
        corpus.extend(result?);
    }
    Ok(corpus)
}

/// One entry of the experiment manifest JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub path: String,
    pub experiment_id: String,
    pub blade_condition: BladeCondition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blade_instance: Option<u8>,
}

/// Read a manifest file (JSON array of entries). Relative experiment paths
/// resolve against the manifest's own directory.
pub fn load_manifest(path: &Path) -> Result<Vec<(PathBuf, ExperimentMeta)>, IngestError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    let entries: Vec<ManifestEntry> = serde_json::from_str(&text)
        .map_err(|e| IngestError::Manifest { path: path.to_path_buf(), reason: e.to_string() })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    entries
        .into_iter()
        .map(|entry| {
            let meta = ExperimentMeta::new(entry.experiment_id, entry.blade_condition, entry.blade_instance);
            meta.validate()?;
            let p = PathBuf::from(&entry.path);
            let resolved = if p.is_absolute() { p } else { base.join(p) };
            Ok((resolved, meta))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta_normal() -> ExperimentMeta {
        ExperimentMeta::new("exp", BladeCondition::Normal, None)
    }

    fn rec(ts: i64, x: f64) -> VibrationRecord<f64> {
        VibrationRecord { sensor: Sensor::Central, timestamp_us: ts, x, y: 0.0, z: 0.0 }
    }

    #[test]
    fn parse_valid_line() {
        let r: VibrationRecord<f64> =
            parse_record_line("Central,1250,0.10,-0.20,0.98", &RecordFormat::default()).unwrap();
        assert_eq!(r.sensor, Sensor::Central);
        assert_eq!(r.timestamp_us, 1250);
        assert_eq!((r.x, r.y, r.z), (0.10, -0.20, 0.98));
    }

    #[test]
    fn parse_is_case_insensitive_on_sensor() {
        let r: VibrationRecord<f64> =
            parse_record_line("oUtEr,0,0,0,0", &RecordFormat::default()).unwrap();
        assert_eq!(r.sensor, Sensor::Outer);
    }

    #[test]
    fn parse_rejects_out_of_range() {
        let err = parse_record_line::<f64>("Outer,0,9.5,0,0", &RecordFormat::default()).unwrap_err();
        assert_eq!(err, RecordParseError::RangeViolation { axis: 'x', value: 9.5 });
    }

    #[test]
    fn parse_rejects_wrong_arity_and_bad_numbers() {
        assert!(matches!(
            parse_record_line::<f64>("Central,0,1,2", &RecordFormat::default()),
            Err(RecordParseError::MalformedLine(_))
        ));
        assert!(matches!(
            parse_record_line::<f64>("Central,0,a,2,3", &RecordFormat::default()),
            Err(RecordParseError::MalformedLine(_))
        ));
        assert!(matches!(
            parse_record_line::<f64>("Rotor,0,1,2,3", &RecordFormat::default()),
            Err(RecordParseError::UnknownSensor(_))
        ));
    }

    #[test]
    fn format_then_parse_is_identity() {
        let format = RecordFormat::default();
        let r = VibrationRecord { sensor: Sensor::Outer, timestamp_us: 31, x: 0.1, y: -7.25, z: 3.5e-3 };
        let line = format.format_record(&r);
        let back: VibrationRecord<f64> = parse_record_line(&line, &format).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn windowing_floor_rule() {
        let meta = meta_normal();
        let records: Vec<_> = (0..47_999).map(|i| rec(i as i64 * 1250, 0.0)).collect();
        let windows = window_stream(&records, 800, &meta);
        assert_eq!(windows.len(), 59);
        let records: Vec<_> = (0..48_000).map(|i| rec(i as i64 * 1250, 0.0)).collect();
        assert_eq!(window_stream(&records, 800, &meta).len(), 60);
    }

    #[test]
    fn windowing_empty_input() {
        let windows = window_stream::<f64>(&[], 800, &meta_normal());
        assert!(windows.is_empty());
    }

    #[test]
    fn window_carries_label_and_id() {
        let meta = ExperimentMeta::new("d1", BladeCondition::DefectType1, Some(2));
        let records: Vec<_> = (0..4).map(|i| rec(i, 0.5)).collect();
        let windows = window_stream(&records, 2, &meta);
        assert_eq!(windows.len(), 2);
        assert_eq!(windows[0].label, LABEL_DEFECTIVE);
        assert_eq!(windows[0].experiment_id, "d1");
        assert_eq!(windows[1].start_timestamp_us, 2);
    }

    #[test]
    fn meta_validation() {
        assert!(ExperimentMeta::new("a", BladeCondition::DefectType2, None).validate().is_err());
        assert!(ExperimentMeta::new("a", BladeCondition::DefectType2, Some(3)).validate().is_err());
        assert!(ExperimentMeta::new("a", BladeCondition::DefectType2, Some(2)).validate().is_ok());
        assert!(meta_normal().validate().is_ok());
    }

    #[test]
    fn load_experiment_reports_line_numbers() {
        let dir = std::env::temp_dir().join(format!("rv-ingest-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "sensor,timestamp,x,y,z\nCentral,0,0,0,0\nCentral,10,9.9,0,0\n").unwrap();
        let err = load_experiment::<f64>(&path, &meta_normal(), &RecordFormat::default()).unwrap_err();
        match err {
            IngestError::Parse { line, source, .. } => {
                assert_eq!(line, 3);
                assert!(matches!(source, RecordParseError::RangeViolation { .. }));
            }
            other => panic!("unexpected error {other:?}"),
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn load_experiment_rejects_timestamp_regression() {
        let dir = std::env::temp_dir().join(format!("rv-ingest-ts-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ts.csv");
        // Interleaved sensors are fine; the order constraint is per stream.
        std::fs::write(&path, "Central,0,0,0,0\nOuter,5,0,0,0\nCentral,10,0,0,0\nCentral,7,0,0,0\n").unwrap();
        let err = load_experiment::<f64>(&path, &meta_normal(), &RecordFormat::default()).unwrap_err();
        assert!(matches!(err, IngestError::NonMonotonicTimestamp { line: 4, .. }));
        std::fs::remove_dir_all(&dir).ok();
    }
}
