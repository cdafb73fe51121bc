//! Study runners: PCA scenarios, the component sweep, feature isolation,
//! and feature-importance aggregation, with machine-readable reports.
//!
//! Every study prepares its data exactly once — one stratified split, one
//! scaler fitted on the training rows — so differences between scenarios
//! are attributable only to the transform and algorithm under study.
//! All model seeds derive from the study seed in a fixed order, making
//! report accuracies bit-reproducible.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureFamily, FeatureSchema};
use crate::ingest::Axis;
use crate::matrix::Matrix;
use crate::models::{
    accuracy, train_model, Algorithm, ModelConfig, ModelError, TrainedModel,
};
use crate::pipeline::{
    stratified_split, stratified_split_by_experiment, Dataset, PcaModel, PipelineError, Scaler,
    Split, SplitMode,
};
use crate::scalar::Scalar;
use crate::seed;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no algorithms requested")]
    NoAlgorithms,
    #[error("no valid component counts for this study (mask {mask_len} columns, {rows} train rows)")]
    NoValidK { mask_len: usize, rows: usize },
    #[error("importance aggregation requires a model trained without PCA")]
    PcaModelRejected,
    #[error("model feature count {model} does not match schema length {schema}")]
    SchemaWidthMismatch { model: usize, schema: usize },
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Which feature block a PCA scenario reduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcaTarget {
    Stft,
    All,
}

/// Study parameters shared by the runners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub train_fraction: f64,
    pub split_mode: SplitMode,
    /// Component counts for the PCA scenarios and isolation variants.
    pub ks: Vec<usize>,
    /// Inclusive component range for the sweep.
    pub sweep_range: (usize, usize),
    pub algorithms: Vec<Algorithm>,
    /// Hyperparameters; the `algorithm` field is overridden per run.
    pub model: ModelConfig,
    /// Top-feature count for importance aggregation.
    pub top_k: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            split_mode: SplitMode::Window,
            ks: vec![10, 15, 20],
            sweep_range: (2, 30),
            algorithms: Algorithm::ALL.to_vec(),
            model: ModelConfig::default(),
            top_k: 10,
        }
    }
}

/// One (scenario, algorithm) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub id: String,
    pub algorithm: String,
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub seed: u64,
    pub duration_ms: u64,
}

/// Importance of one ranked feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub name: String,
    pub family: String,
    pub axis: String,
    pub importance: f64,
}

/// Gini-importance breakdown for one tree-based model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceAggregate {
    pub algorithm: String,
    pub top_features: Vec<FeatureImportance>,
    /// Family membership counts among the top features.
    pub top_count_by_family: Vec<(String, usize)>,
    /// Summed importance per family over all features (sums to 1).
    pub importance_by_family: Vec<(String, f64)>,
    /// Axis membership counts among the top features.
    pub top_count_by_axis: Vec<(String, usize)>,
    /// Summed importance per axis over all features (sums to 1).
    pub importance_by_axis: Vec<(String, f64)>,
}

/// Study output, serializable as the report JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: String,
    pub seed: u64,
    pub config: StudyConfig,
    pub scenarios: Vec<ScenarioResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub importance: Option<Vec<ImportanceAggregate>>,
    /// Sweep only: accuracy-maximizing component count (ties -> smallest).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_k: Option<usize>,
}

/// Split + standardized partitions; the only way study code touches data.
/// Fitting happens against the training rows exclusively.
struct Prepared<F> {
    x_train: Matrix<F>,
    x_test: Matrix<F>,
    y_train: Vec<u8>,
    y_test: Vec<u8>,
}

fn prepare<F: Scalar>(
    dataset: &Dataset<F>,
    config: &StudyConfig,
    study_seed: u64,
) -> Result<(Split, Scaler<F>, Prepared<F>), AnalysisError> {
    let split = match config.split_mode {
        SplitMode::Window => stratified_split(&dataset.labels, config.train_fraction, study_seed)?,
        SplitMode::Experiment => stratified_split_by_experiment(
            &dataset.labels,
            &dataset.experiment_ids,
            config.train_fraction,
            study_seed,
        )?,
    };
    let x_train_raw = dataset.x.select_rows(&split.train);
    let x_test_raw = dataset.x.select_rows(&split.test);
    let scaler = Scaler::fit(&x_train_raw)?;
    let prepared = Prepared {
        x_train: scaler.apply(&x_train_raw)?,
        x_test: scaler.apply(&x_test_raw)?,
        y_train: split.train.iter().map(|&i| dataset.labels[i]).collect(),
        y_test: split.test.iter().map(|&i| dataset.labels[i]).collect(),
    };
    Ok((split, scaler, prepared))
}

/// Train one algorithm and score it on the test partition.
fn run_one<F: Scalar>(
    id: &str,
    k: Option<usize>,
    algorithm: Algorithm,
    x_train: &Matrix<F>,
    y_train: &[u8],
    x_test: &Matrix<F>,
    y_test: &[u8],
    base: &ModelConfig,
    run_seed: u64,
) -> Result<(ScenarioResult, TrainedModel<F>), AnalysisError> {
    let start = Instant::now();
    let config = ModelConfig { algorithm, ..base.clone() };
    let model = train_model(x_train, y_train, &config, run_seed)?;
    let predictions = model.predict(x_test)?;
    let acc = accuracy(&predictions, y_test)?;
    Ok((
        ScenarioResult {
            id: id.to_string(),
            algorithm: algorithm.name().to_string(),
            accuracy: acc,
            k,
            seed: run_seed,
            duration_ms: start.elapsed().as_millis() as u64,
        },
        model,
    ))
}

/// Component counts usable for a mask of `mask_len` columns over
/// `train_rows` rows, preserving request order.
fn valid_ks(requested: &[usize], mask_len: usize, train_rows: usize) -> Vec<usize> {
    let max = mask_len.min(train_rows.saturating_sub(1));
    requested.iter().copied().filter(|&k| k >= 1 && k <= max).collect()
}

/// The three PCA scenarios: none, STFT-only reduction, full reduction.
pub fn run_pca_scenarios<F: Scalar>(
    dataset: &Dataset<F>,
    config: &StudyConfig,
    study_seed: u64,
) -> Result<StudyReport, AnalysisError> {
    if config.algorithms.is_empty() {
        return Err(AnalysisError::NoAlgorithms);
    }
    let (_split, _scaler, prep) = prepare(dataset, config, study_seed)?;
    let mut scenarios = Vec::new();
    let mut run_counter = 0u64;
    let mut next_seed = || {
        run_counter += 1;
        seed::derive(study_seed, run_counter)
    };

    for &algorithm in &config.algorithms {
        let (result, _) = run_one(
            "no_pca",
            None,
            algorithm,
            &prep.x_train,
            &prep.y_train,
            &prep.x_test,
            &prep.y_test,
            &config.model,
            next_seed(),
        )?;
        scenarios.push(result);
    }

    for (target, id) in [(PcaTarget::Stft, "stft_pca"), (PcaTarget::All, "all_pca")] {
        let mask = match target {
            PcaTarget::Stft => dataset.schema.family_columns(FeatureFamily::Stft),
            PcaTarget::All => (0..dataset.n_cols()).collect(),
        };
        let ks = valid_ks(&config.ks, mask.len(), prep.x_train.rows());
        if ks.is_empty() {
            continue;
        }
        let k_max = *ks.iter().max().expect("non-empty");
        let pca_full = PcaModel::fit(&prep.x_train, k_max, &mask)?;
        for &k in &ks {
            let pca = pca_full.truncate(k)?;
            let x_train = pca.transform(&prep.x_train)?;
            let x_test = pca.transform(&prep.x_test)?;
            for &algorithm in &config.algorithms {
                let (result, _) = run_one(
                    id,
                    Some(k),
                    algorithm,
                    &x_train,
                    &prep.y_train,
                    &x_test,
                    &prep.y_test,
                    &config.model,
                    next_seed(),
                )?;
                scenarios.push(result);
            }
        }
    }

    Ok(StudyReport {
        study: "pca-scenarios".into(),
        seed: study_seed,
        config: config.clone(),
        scenarios,
        importance: None,
        best_k: None,
    })
}

/// Sweep the component count over `config.sweep_range` for one algorithm
/// (STFT-targeted or full-set PCA) and report the accuracy-maximizing `k`.
pub fn pca_component_sweep<F: Scalar>(
    dataset: &Dataset<F>,
    algorithm: Algorithm,
    target: PcaTarget,
    config: &StudyConfig,
    study_seed: u64,
) -> Result<StudyReport, AnalysisError> {
    let (_split, _scaler, prep) = prepare(dataset, config, study_seed)?;
    let mask = match target {
        PcaTarget::Stft => dataset.schema.family_columns(FeatureFamily::Stft),
        PcaTarget::All => (0..dataset.n_cols()).collect(),
    };
    let (lo, hi) = config.sweep_range;
    let requested: Vec<usize> = (lo..=hi).collect();
    let ks = valid_ks(&requested, mask.len(), prep.x_train.rows());
    if ks.is_empty() {
        return Err(AnalysisError::NoValidK { mask_len: mask.len(), rows: prep.x_train.rows() });
    }
    let id = match target {
        PcaTarget::Stft => "stft_pca",
        PcaTarget::All => "all_pca",
    };

    let k_max = *ks.iter().max().expect("non-empty");
    let pca_full = PcaModel::fit(&prep.x_train, k_max, &mask)?;
    let mut scenarios = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let pca = pca_full.truncate(k)?;
        let x_train = pca.transform(&prep.x_train)?;
        let x_test = pca.transform(&prep.x_test)?;
        let (result, _) = run_one(
            id,
            Some(k),
            algorithm,
            &x_train,
            &prep.y_train,
            &x_test,
            &prep.y_test,
            &config.model,
            seed::derive(study_seed, 0x2000 + i as u64),
        )?;
        scenarios.push(result);
    }

    // Ties resolve to the smallest k: strict improvement required.
    let mut best = &scenarios[0];
    for s in &scenarios[1..] {
        if s.accuracy > best.accuracy {
            best = s;
        }
    }
    let best_k = best.k;

    Ok(StudyReport {
        study: "pca-sweep".into(),
        seed: study_seed,
        config: config.clone(),
        scenarios,
        importance: None,
        best_k,
    })
}

/// Train on each feature family in isolation, with and without PCA where
/// the column count permits.
pub fn run_feature_isolation<F: Scalar>(
    dataset: &Dataset<F>,
    config: &StudyConfig,
    study_seed: u64,
) -> Result<StudyReport, AnalysisError> {
    if config.algorithms.is_empty() {
        return Err(AnalysisError::NoAlgorithms);
    }
    let (_split, _scaler, prep) = prepare(dataset, config, study_seed)?;
    let mut scenarios = Vec::new();
    let mut run_counter = 0x3000u64;
    let mut next_seed = || {
        run_counter += 1;
        seed::derive(study_seed, run_counter)
    };

    for family in [FeatureFamily::Stft, FeatureFamily::Wavelet, FeatureFamily::TimeDomain] {
        let columns = dataset.schema.family_columns(family);
        if columns.is_empty() {
            return Err(AnalysisError::Pipeline(PipelineError::UnknownFamily(
                family.name().to_string(),
            )));
        }
        let x_train = prep.x_train.select_cols(&columns);
        let x_test = prep.x_test.select_cols(&columns);
        let id = format!("isolation_{}", family.name());

        for &algorithm in &config.algorithms {
            let (result, _) = run_one(
                &id,
                None,
                algorithm,
                &x_train,
                &prep.y_train,
                &x_test,
                &prep.y_test,
                &config.model,
                next_seed(),
            )?;
            scenarios.push(result);
        }

        // PCA variants, with k capped by the family's column count.
        let ks = valid_ks(&config.ks, columns.len(), x_train.rows());
        if ks.is_empty() {
            continue;
        }
        let k_max = *ks.iter().max().expect("non-empty");
        let mask: Vec<usize> = (0..columns.len()).collect();
        let pca_full = PcaModel::fit(&x_train, k_max, &mask)?;
        for &k in &ks {
            let pca = pca_full.truncate(k)?;
            let x_train_k = pca.transform(&x_train)?;
            let x_test_k = pca.transform(&x_test)?;
            for &algorithm in &config.algorithms {
                let (result, _) = run_one(
                    &id,
                    Some(k),
                    algorithm,
                    &x_train_k,
                    &prep.y_train,
                    &x_test_k,
                    &prep.y_test,
                    &config.model,
                    next_seed(),
                )?;
                scenarios.push(result);
            }
        }
    }

    Ok(StudyReport {
        study: "isolation".into(),
        seed: study_seed,
        config: config.clone(),
        scenarios,
        importance: None,
        best_k: None,
    })
}

/// Best test accuracy achieved for one isolated family, across algorithms
/// and PCA variants.
pub fn best_isolation_accuracy(report: &StudyReport, family: FeatureFamily) -> Option<f64> {
    let id = format!("isolation_{}", family.name());
    report
        .scenarios
        .iter()
        .filter(|s| s.id == id)
        .map(|s| s.accuracy)
        .max_by(|a, b| a.partial_cmp(b).unwrap())
}

/// Rank features of a tree-based, PCA-free model by Gini importance and
/// break the ranking down by family and axis.
pub fn aggregate_importance<F: Scalar>(
    model: &TrainedModel<F>,
    schema: &FeatureSchema,
    top_k: usize,
) -> Result<ImportanceAggregate, AnalysisError> {
    let importances = model.gini_importance()?;
    if importances.len() != schema.len() {
        return Err(AnalysisError::SchemaWidthMismatch {
            model: importances.len(),
            schema: schema.len(),
        });
    }

    let mut ranked: Vec<usize> = (0..importances.len()).collect();
    ranked.sort_by(|&a, &b| {
        importances[b].partial_cmp(&importances[a]).unwrap().then(a.cmp(&b))
    });
    let top_k = top_k.min(ranked.len());
    let descriptors = schema.descriptors();

    let top_features: Vec<FeatureImportance> = ranked[..top_k]
        .iter()
        .map(|&i| FeatureImportance {
            name: descriptors[i].name.clone(),
            family: descriptors[i].family.short_label().to_string(),
            axis: descriptors[i].axis.name().to_string(),
            importance: importances[i].as_f64(),
        })
        .collect();

    let mut top_count_by_family = Vec::new();
    let mut importance_by_family = Vec::new();
    for family in FeatureFamily::ALL {
        let label = family.short_label().to_string();
        let count = ranked[..top_k].iter().filter(|&&i| descriptors[i].family == family).count();
        let total: f64 = (0..importances.len())
            .filter(|&i| descriptors[i].family == family)
            .map(|i| importances[i].as_f64())
            .sum();
        top_count_by_family.push((label.clone(), count));
        importance_by_family.push((label, total));
    }

    let mut top_count_by_axis = Vec::new();
    let mut importance_by_axis = Vec::new();
    for axis in Axis::ALL {
        let label = axis.name().to_string();
        let count = ranked[..top_k].iter().filter(|&&i| descriptors[i].axis == axis).count();
        let total: f64 = (0..importances.len())
            .filter(|&i| descriptors[i].axis == axis)
            .map(|i| importances[i].as_f64())
            .sum();
        top_count_by_axis.push((label.clone(), count));
        importance_by_axis.push((label, total));
    }

    Ok(ImportanceAggregate {
        algorithm: model.algorithm().name().to_string(),
        top_features,
        top_count_by_family,
        importance_by_family,
        top_count_by_axis,
        importance_by_axis,
    })
}

/// As [`aggregate_importance`], but for a persisted bundle; rejects models
/// trained with PCA (reduced spaces aren't explainable in schema terms).
pub fn aggregate_importance_from_bundle<F: Scalar>(
    bundle: &crate::models::ModelBundle<F>,
    schema: &FeatureSchema,
    top_k: usize,
) -> Result<ImportanceAggregate, AnalysisError> {
    if bundle.pca.is_some() {
        return Err(AnalysisError::PcaModelRejected);
    }
    aggregate_importance(&bundle.model, schema, top_k)
}

/// Train the tree-based algorithms without PCA and aggregate their
/// importances.
pub fn run_importance_study<F: Scalar>(
    dataset: &Dataset<F>,
    config: &StudyConfig,
    study_seed: u64,
) -> Result<StudyReport, AnalysisError> {
    let (_split, _scaler, prep) = prepare(dataset, config, study_seed)?;
    let mut scenarios = Vec::new();
    let mut aggregates = Vec::new();

    for (i, algorithm) in [Algorithm::DecisionTree, Algorithm::RandomForest].into_iter().enumerate() {
        let (result, model) = run_one(
            "no_pca",
            None,
            algorithm,
            &prep.x_train,
            &prep.y_train,
            &prep.x_test,
            &prep.y_test,
            &config.model,
            seed::derive(study_seed, 0x4000 + i as u64),
        )?;
        scenarios.push(result);
        aggregates.push(aggregate_importance(&model, &dataset.schema, config.top_k)?);
    }

    Ok(StudyReport {
        study: "importance".into(),
        seed: study_seed,
        config: config.clone(),
        scenarios,
        importance: Some(aggregates),
        best_k: None,
    })
}

/// Report file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Write a report. JSON carries the whole report; CSV mirrors the scenario
/// table (and, when present, importances to `<stem>_importance.csv`).
pub fn emit_report(report: &StudyReport, path: &Path, format: ReportFormat) -> Result<(), AnalysisError> {
    let io_err = |source| AnalysisError::Io { path: path.to_path_buf(), source };
    match format {
        ReportFormat::Json => {
            let json = serde_json::to_string_pretty(report).expect("report serializes");
            std::fs::write(path, json).map_err(io_err)?;
        }
        ReportFormat::Csv => {
            let mut out = String::from("study,scenario,algorithm,k,accuracy,seed,duration_ms\n");
            for s in &report.scenarios {
                let k = s.k.map_or(String::new(), |k| k.to_string());
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    report.study, s.id, s.algorithm, k, s.accuracy, s.seed, s.duration_ms
                ));
            }
            std::fs::write(path, out).map_err(io_err)?;

            if let Some(aggregates) = &report.importance {
                let mut out = String::from("algorithm,kind,key,value\n");
                for agg in aggregates {
                    for f in &agg.top_features {
                        out.push_str(&format!(
                            "{},top_feature,{},{}\n",
                            agg.algorithm, f.name, f.importance
                        ));
                    }
                    for (label, count) in &agg.top_count_by_family {
                        out.push_str(&format!("{},top_count_family,{label},{count}\n", agg.algorithm));
                    }
                    for (label, v) in &agg.importance_by_family {
                        out.push_str(&format!("{},importance_family,{label},{v}\n", agg.algorithm));
                    }
                    for (label, count) in &agg.top_count_by_axis {
                        out.push_str(&format!("{},top_count_axis,{label},{count}\n", agg.algorithm));
                    }
                    for (label, v) in &agg.importance_by_axis {
                        out.push_str(&format!("{},importance_axis,{label},{v}\n", agg.algorithm));
                    }
                }
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
                let side = path.with_file_name(format!("{stem}_importance.csv"));
                std::fs::write(&side, out)
                    .map_err(|source| AnalysisError::Io { path: side.clone(), source })?;
            }
        }
    }
    Ok(())
}
