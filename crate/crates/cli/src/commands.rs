//! The five subcommands, wired from config + flags to core calls.

use std::io::Write as IoWrite;
use std::path::PathBuf;

use serde::Serialize;

use rotorvib_core::analysis::{
    self, PcaTarget, ReportFormat, StudyReport,
};
use rotorvib_core::features::{self, FeatureFamily, SchemaFile};
use rotorvib_core::ingest::{self, RecordFormat};
use rotorvib_core::models::{accuracy, train_model, Algorithm, ModelBundle, ModelConfig};
use rotorvib_core::pipeline::{
    stratified_split, stratified_split_by_experiment, Dataset, PcaModel, Scaler, SplitMode,
};
use rotorvib_core::synth;

use crate::config::{PcaSpec, RunConfig};
use crate::{CliError, EvalArgs, ExtractArgs, StudyArgs, SynthArgs, TrainArgs};

fn progress(msg: &str) {
    eprintln!("rotorvib: {msg}");
}

fn print_stdout<T: Serialize>(value: &T) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(format!("cannot serialize result: {e}")))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{json}").map_err(|e| CliError::Data(format!("stdout: {e}")))?;
    Ok(())
}

#[derive(Serialize)]
struct SynthSummary {
    manifest: PathBuf,
    experiments: usize,
    duration_s: f64,
    seed: u64,
}

pub fn cmd_synth(config: &RunConfig, args: &SynthArgs) -> Result<(), CliError> {
    let out_dir = RunConfig::require_path(None, &config.paths.out_dir, "output directory (--out-dir)")?;
    let mut corpus = config.corpus;
    if let Some(d) = args.duration_s {
        corpus.duration_s = d;
    }
    if let Some(s) = args.noise_sigma {
        corpus.snr.noise_sigma = s;
    }
    if let Some(g) = args.harmonic_gain {
        corpus.snr.harmonic_gain = g;
    }
    progress(&format!("generating corpus into {}", out_dir.display()));
    let manifest = synth::write_corpus::<f64>(&out_dir, config.seed, &corpus)?;
    print_stdout(&SynthSummary {
        manifest,
        experiments: 26,
        duration_s: corpus.duration_s,
        seed: config.seed,
    })
}

#[derive(Serialize)]
struct ExtractSummary {
    matrix: PathBuf,
    schema: PathBuf,
    rows: usize,
    cols: usize,
    normal: usize,
    defective: usize,
    schema_fingerprint: String,
}

pub fn cmd_extract(config: &RunConfig, args: &ExtractArgs) -> Result<(), CliError> {
    let manifest_path =
        RunConfig::require_path(args.manifest.clone(), &config.paths.manifest, "manifest path")?;
    let matrix_path = match args.matrix.clone().or_else(|| config.paths.matrix.clone()) {
        Some(p) => p,
        None => RunConfig::require_path(None, &config.paths.out_dir, "matrix path or --out-dir")?
            .join("features.csv"),
    };
    let schema_path = args
        .schema
        .clone()
        .or_else(|| config.paths.schema.clone())
        .unwrap_or_else(|| RunConfig::schema_sidecar(&matrix_path));

    let format = RecordFormat::default();
    let experiments = ingest::load_manifest(&manifest_path)?;
    progress(&format!("loading {} experiments", experiments.len()));
    let pairs = ingest::assemble_corpus::<f64>(&experiments, &format, config.window_size)?;
    progress(&format!("extracting features from {} window pairs", pairs.len()));
    let (schema, vectors) = features::extract_corpus(&pairs, &config.features)?;
    let dataset = Dataset::from_feature_vectors(schema, vectors)?;

    if let Some(parent) = matrix_path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Data(format!("{}: {e}", parent.display())))?;
    }
    dataset.write_csv(&matrix_path)?;
    SchemaFile::new(dataset.schema.clone(), config.features).write(&schema_path)?;

    if let Some(mag_path) = &args.magnitude_out {
        write_magnitude_channel(&experiments, &format, mag_path)?;
    }

    let (normal, defective) = dataset.class_counts();
    print_stdout(&ExtractSummary {
        matrix: matrix_path,
        schema: schema_path,
        rows: dataset.n_rows(),
        cols: dataset.n_cols(),
        normal,
        defective,
        schema_fingerprint: dataset.schema.fingerprint(),
    })
}

/// The per-record magnitude channel, one CSV row per record.
fn write_magnitude_channel(
    experiments: &[(PathBuf, ingest::ExperimentMeta)],
    format: &RecordFormat,
    path: &PathBuf,
) -> Result<(), CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    let io_err = |e: std::io::Error| CliError::Data(format!("{}: {e}", path.display()));
    writeln!(w, "experiment_id,sensor,timestamp_us,magnitude").map_err(io_err)?;
    for (exp_path, meta) in experiments {
        let streams = ingest::load_experiment::<f64>(exp_path, meta, format)?;
        for records in [&streams.central, &streams.outer] {
            let sensor = records.first().map_or("", |r| r.sensor.name());
            for (ts, magnitude) in features::magnitude_channel(records) {
                writeln!(w, "{},{},{},{}", meta.experiment_id, sensor, ts, magnitude)
                    .map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}

fn read_dataset(
    matrix: Option<PathBuf>,
    schema: Option<PathBuf>,
    family: &Option<String>,
    config: &RunConfig,
) -> Result<Dataset<f64>, CliError> {
    let matrix_path = RunConfig::require_path(matrix, &config.paths.matrix, "matrix path")?;
    let schema_path = schema
        .or_else(|| config.paths.schema.clone())
        .unwrap_or_else(|| RunConfig::schema_sidecar(&matrix_path));
    let schema_file = SchemaFile::read(&schema_path)?;
    let dataset = Dataset::<f64>::read_csv(&matrix_path, schema_file.schema)?;
    match family.as_deref().or(config.family.as_deref()) {
        Some(name) => {
            let family: FeatureFamily = name.parse().map_err(CliError::Config)?;
            Ok(dataset.select_family(family)?)
        }
        None => Ok(dataset),
    }
}

#[derive(Serialize)]
struct TrainSummary {
    algorithm: String,
    train_accuracy: f64,
    test_accuracy: f64,
    n_train: usize,
    n_test: usize,
    pca_k: Option<usize>,
    converged: Option<bool>,
    model: PathBuf,
    schema_fingerprint: String,
    seed: u64,
}

pub fn cmd_train(config: &RunConfig, args: &TrainArgs) -> Result<(), CliError> {
    let dataset = read_dataset(args.matrix.clone(), args.schema.clone(), &args.family, config)?;
    let seed = config.seed;
    let fraction = args.train_fraction.unwrap_or(config.study.train_fraction);
    let split_mode = match &args.split_mode {
        Some(s) => parse_split_mode(s)?,
        None => config.study.split_mode,
    };
    let split = match split_mode {
        SplitMode::Window => stratified_split(&dataset.labels, fraction, seed)?,
        SplitMode::Experiment => {
            stratified_split_by_experiment(&dataset.labels, &dataset.experiment_ids, fraction, seed)?
        }
    };

    let x_train_raw = dataset.x.select_rows(&split.train);
    let x_test_raw = dataset.x.select_rows(&split.test);
    let y_train: Vec<u8> = split.train.iter().map(|&i| dataset.labels[i]).collect();
    let y_test: Vec<u8> = split.test.iter().map(|&i| dataset.labels[i]).collect();
    let scaler = Scaler::fit(&x_train_raw)?;
    let x_train = scaler.apply(&x_train_raw)?;
    let x_test = scaler.apply(&x_test_raw)?;

    let pca_spec = resolve_pca_spec(args, config)?;
    let (pca, x_train, x_test) = match pca_spec {
        Some(spec) => {
            let mask = match spec.target {
                PcaTarget::Stft => dataset.schema.family_columns(FeatureFamily::Stft),
                PcaTarget::All => (0..dataset.n_cols()).collect(),
            };
            if mask.is_empty() {
                return Err(CliError::Config("PCA target selects no columns".into()));
            }
            let pca = PcaModel::fit(&x_train, spec.k, &mask)?;
            let train = pca.transform(&x_train)?;
            let test = pca.transform(&x_test)?;
            (Some(pca), train, test)
        }
        None => (None, x_train, x_test),
    };

    let algorithm = match &args.algorithm {
        Some(name) => name.parse::<Algorithm>().map_err(CliError::Config)?,
        None => config.study.model.algorithm,
    };
    let model_config = ModelConfig { algorithm, ..config.study.model.clone() };
    progress(&format!("training {algorithm} on {} rows", x_train.rows()));
    let model = train_model(&x_train, &y_train, &model_config, seed)?;

    let train_accuracy = accuracy(&model.predict(&x_train)?, &y_train)?;
    let test_accuracy = accuracy(&model.predict(&x_test)?, &y_test)?;
    let converged = match &model {
        rotorvib_core::models::TrainedModel::Svm(m) => Some(m.converged),
        _ => None,
    };

    let model_path = match args.model_out.clone().or_else(|| config.paths.model.clone()) {
        Some(p) => p,
        None => RunConfig::require_path(None, &config.paths.out_dir, "model path or --out-dir")?
            .join("model.json"),
    };
    let pca_k = pca.as_ref().map(|p| p.k());
    let bundle = ModelBundle::new(&dataset.schema, scaler, pca, model, model_config, seed);
    bundle.save(&model_path)?;

    print_stdout(&TrainSummary {
        algorithm: algorithm.name().to_string(),
        train_accuracy,
        test_accuracy,
        n_train: y_train.len(),
        n_test: y_test.len(),
        pca_k,
        converged,
        model: model_path,
        schema_fingerprint: bundle.schema_fingerprint.clone(),
        seed,
    })
}

fn parse_split_mode(s: &str) -> Result<SplitMode, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "window" => Ok(SplitMode::Window),
        "experiment" => Ok(SplitMode::Experiment),
        other => Err(CliError::Config(format!("unknown split mode '{other}'"))),
    }
}

fn parse_pca_target(s: &str) -> Result<PcaTarget, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "stft" => Ok(PcaTarget::Stft),
        "all" => Ok(PcaTarget::All),
        other => Err(CliError::Config(format!("unknown PCA target '{other}'"))),
    }
}

fn resolve_pca_spec(args: &TrainArgs, config: &RunConfig) -> Result<Option<PcaSpec>, CliError> {
    match (&args.pca_target, args.pca_k) {
        (Some(target), Some(k)) => Ok(Some(PcaSpec { target: parse_pca_target(target)?, k })),
        (Some(_), None) => Err(CliError::Config("--pca-target requires --pca-k".into())),
        (None, Some(_)) => Err(CliError::Config("--pca-k requires --pca-target".into())),
        (None, None) => Ok(config.pca),
    }
}

#[derive(Serialize)]
struct EvalSummary {
    accuracy: f64,
    n_rows: usize,
    schema_fingerprint: String,
    algorithm: String,
}

pub fn cmd_eval(config: &RunConfig, args: &EvalArgs) -> Result<(), CliError> {
    let model_path = RunConfig::require_path(args.model.clone(), &config.paths.model, "model path")?;
    let bundle = ModelBundle::<f64>::load(&model_path)?;
    let dataset = read_dataset(args.matrix.clone(), args.schema.clone(), &args.family, config)?;
    bundle.check_schema(&dataset.schema)?;
    let predictions = bundle.predict_raw(&dataset.x)?;
    let acc = accuracy(&predictions, &dataset.labels)?;
    print_stdout(&EvalSummary {
        accuracy: acc,
        n_rows: dataset.n_rows(),
        schema_fingerprint: bundle.schema_fingerprint.clone(),
        algorithm: bundle.model.algorithm().name().to_string(),
    })
}

#[derive(Serialize)]
struct StudySummary {
    study: String,
    report: PathBuf,
    scenarios: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_accuracy: Option<f64>,
}

pub fn cmd_study(config: &RunConfig, args: &StudyArgs) -> Result<(), CliError> {
    let dataset = read_dataset(args.matrix.clone(), args.schema.clone(), &args.family, config)?;
    let mut study_config = config.study.clone();
    if let Some(ks) = &args.ks {
        study_config.ks = parse_ks(ks)?;
    }
    let seed = config.seed;

    progress(&format!("running {} study on {} rows", args.study, dataset.n_rows()));
    let report: StudyReport = match args.study.as_str() {
        "pca-scenarios" => analysis::run_pca_scenarios(&dataset, &study_config, seed)?,
        "pca-sweep" => {
            let algorithm = match &args.algorithm {
                Some(name) => name.parse::<Algorithm>().map_err(CliError::Config)?,
                None => Algorithm::DecisionTree,
            };
            let target = match &args.pca_target {
                Some(t) => parse_pca_target(t)?,
                None => PcaTarget::Stft,
            };
            analysis::pca_component_sweep(&dataset, algorithm, target, &study_config, seed)?
        }
        "isolation" => analysis::run_feature_isolation(&dataset, &study_config, seed)?,
        "importance" => analysis::run_importance_study(&dataset, &study_config, seed)?,
        other => {
            return Err(CliError::Config(format!(
                "unknown study '{other}' (expected pca-scenarios, pca-sweep, isolation, importance)"
            )))
        }
    };

    let extension = match config.format {
        ReportFormat::Json => "json",
        ReportFormat::Csv => "csv",
    };
    let report_path = match args.report.clone().or_else(|| config.paths.report.clone()) {
        Some(p) => p,
        None => RunConfig::require_path(None, &config.paths.out_dir, "report path or --out-dir")?
            .join(format!("report_{}.{extension}", args.study)),
    };
    if let Some(parent) = report_path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Data(format!("{}: {e}", parent.display())))?;
    }
    analysis::emit_report(&report, &report_path, config.format)?;

    let best = report
        .scenarios
        .iter()
        .max_by(|a, b| a.accuracy.partial_cmp(&b.accuracy).unwrap());
    print_stdout(&StudySummary {
        study: report.study.clone(),
        report: report_path,
        scenarios: report.scenarios.len(),
        best_k: report.best_k,
        best_accuracy: best.map(|s| s.accuracy),
    })
}

fn parse_ks(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("bad component count '{part}'")))
        })
        .collect()
}
