//! `rotorvib` — rotor blade defect detection from vibration recordings.
//!
//! Subcommands cover the full pipeline: `synth` generates a seeded
//! synthetic corpus, `extract` turns experiment logs into a feature
//! matrix, `train`/`eval` fit and score single models, and `study` runs
//! the PCA, isolation, and importance analyses.
//!
//! Progress goes to stderr; results go to stdout or files. Every command
//! is deterministic given its configuration: all randomness flows from
//! the explicit seed.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rotorvib_core::analysis::{AnalysisError, ReportFormat};
use rotorvib_core::features::{FeatureError, SchemaIoError};
use rotorvib_core::ingest::IngestError;
use rotorvib_core::models::{BundleError, ModelError};
use rotorvib_core::pipeline::PipelineError;
use rotorvib_core::synth::SynthError;

use config::RunConfig;

/// Failure classified by exit code: 2 config, 3 data, 4 numeric.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Data(_) => "data",
            CliError::Numeric(_) => "numeric",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Data(m) | CliError::Numeric(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Single line, machine-parsable: error[<kind>] <message>
        let msg = self.message().replace('\n', " | ");
        write!(f, "error[{}] {}", self.kind(), msg)
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SchemaIoError> for CliError {
    fn from(e: SchemaIoError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::KTooLarge { .. }
            | PipelineError::InvalidFraction(_)
            | PipelineError::EmptyMask
            | PipelineError::UnknownFamily(_) => CliError::Config(e.to_string()),
            PipelineError::NonFinite => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        match e {
            FeatureError::InvalidParams(_) => CliError::Config(e.to_string()),
            FeatureError::NonFinite { .. }
            | FeatureError::ZeroSpectrum
            | FeatureError::DegenerateSpectrum => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::InvalidProfile(_) => CliError::Config(e.to_string()),
            SynthError::ClippingProfile { .. } => CliError::Numeric(e.to_string()),
            SynthError::Io { .. } => CliError::Data(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NotTreeBased | ModelError::InvalidK { .. } => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<BundleError> for CliError {
    fn from(e: BundleError) -> Self {
        match e {
            BundleError::Pipeline(inner) => inner.into(),
            BundleError::Model(inner) => inner.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Pipeline(inner) => inner.into(),
            AnalysisError::Model(inner) => inner.into(),
            AnalysisError::Io { .. } => CliError::Data(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "rotorvib", version, about = "Rotor blade defect detection from vibration data")]
struct Cli {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed for all randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for generated outputs.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Report format: json or csv.
    #[arg(long, global = true)]
    format: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic 26-experiment corpus plus manifest.
    Synth(SynthArgs),
    /// Ingest experiments from a manifest and write the feature matrix.
    Extract(ExtractArgs),
    /// Split, standardize, optionally reduce, and train one classifier.
    Train(TrainArgs),
    /// Score a saved model against a feature matrix.
    Eval(EvalArgs),
    /// Run one of the analysis studies and write its report.
    Study(StudyArgs),
}

#[derive(Args)]
pub struct SynthArgs {
    /// Seconds per experiment (default 60).
    #[arg(long)]
    pub duration_s: Option<f64>,
    /// Base noise sigma in g.
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Harmonic amplitude multiplier (0 = noise only).
    #[arg(long)]
    pub harmonic_gain: Option<f64>,
}

#[derive(Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Output matrix CSV path.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Output schema JSON path (default: <matrix>.schema.json).
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Also write the per-record magnitude channel to this CSV.
    #[arg(long)]
    pub magnitude_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// svm, decision-tree, random-forest, or knn.
    #[arg(long)]
    pub algorithm: Option<String>,
    /// Where to write the model bundle.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Apply PCA before training: stft or all.
    #[arg(long)]
    pub pca_target: Option<String>,
    #[arg(long)]
    pub pca_k: Option<usize>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// window or experiment.
    #[arg(long)]
    pub split_mode: Option<String>,
    /// Train on one feature family only.
    #[arg(long)]
    pub family: Option<String>,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Family filter matching the one used at training time.
    #[arg(long)]
    pub family: Option<String>,
}

#[derive(Args)]
pub struct StudyArgs {
    /// pca-scenarios, pca-sweep, isolation, or importance.
    #[arg(long)]
    pub study: String,
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Report output path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Algorithm for pca-sweep.
    #[arg(long)]
    pub algorithm: Option<String>,
    /// PCA target for pca-sweep: stft or all.
    #[arg(long)]
    pub pca_target: Option<String>,
    /// Comma-separated component counts, e.g. 10,15,20.
    #[arg(long)]
    pub ks: Option<String>,
    /// Restrict the feature space to one family first.
    #[arg(long)]
    pub family: Option<String>,
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out_dir) = &cli.out_dir {
        config.paths.out_dir = Some(out_dir.clone());
    }
    if let Some(format) = &cli.format {
        config.format = match format.trim().to_ascii_lowercase().as_str() {
            "json" => ReportFormat::Json,
            "csv" => ReportFormat::Csv,
            other => return Err(CliError::Config(format!("unknown format '{other}'"))),
        };
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = resolve_config(cli)?;
    match &cli.command {
        Command::Synth(args) => commands::cmd_synth(&config, args),
        Command::Extract(args) => commands::cmd_extract(&config, args),
        Command::Train(args) => commands::cmd_train(&config, args),
        Command::Eval(args) => commands::cmd_eval(&config, args),
        Command::Study(args) => commands::cmd_study(&config, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
