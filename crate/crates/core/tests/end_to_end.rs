//! File-level integration: synth corpus files -> manifest -> ingest ->
//! features -> models, at reduced duration, plus the generator
//! self-checks that need the ML stack.

mod common;

use rotorvib_core::analysis::{run_pca_scenarios, StudyConfig};
use rotorvib_core::features::{extract_corpus, std_dev, FeatureConfig};
use rotorvib_core::ingest::{assemble_corpus, load_manifest, BladeCondition, RecordFormat, Sensor};
use rotorvib_core::models::{accuracy, train_model, Algorithm, ModelBundle, ModelConfig};
use rotorvib_core::pipeline::{stratified_split, Dataset, Scaler};
use rotorvib_core::synth::{
    generate_paper_shaped_corpus, write_corpus, CorpusConfig, SnrConfig,
};

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("rotorvib-e2e-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn file_chain_reaches_high_accuracy() {
    let dir = temp_dir("chain");
    let corpus_config = CorpusConfig { duration_s: 6.0, ..CorpusConfig::default() };
    let manifest_path = write_corpus::<f64>(&dir, 7, &corpus_config).unwrap();

    let experiments = load_manifest(&manifest_path).unwrap();
    assert_eq!(experiments.len(), 26);
    let pairs = assemble_corpus::<f64>(&experiments, &RecordFormat::default(), 800).unwrap();
    assert_eq!(pairs.len(), 26 * 6);

    let (schema, vectors) = extract_corpus(&pairs, &FeatureConfig::default()).unwrap();
    let dataset = Dataset::from_feature_vectors(schema, vectors).unwrap();
    assert_eq!(dataset.class_counts(), (48, 108));

    let split = stratified_split(&dataset.labels, 0.7, 3).unwrap();
    let x_train_raw = dataset.x.select_rows(&split.train);
    let x_test_raw = dataset.x.select_rows(&split.test);
    let y_train: Vec<u8> = split.train.iter().map(|&i| dataset.labels[i]).collect();
    let y_test: Vec<u8> = split.test.iter().map(|&i| dataset.labels[i]).collect();
    let scaler = Scaler::fit(&x_train_raw).unwrap();
    let x_train = scaler.apply(&x_train_raw).unwrap();
    let x_test = scaler.apply(&x_test_raw).unwrap();

    let config = ModelConfig::for_algorithm(Algorithm::RandomForest);
    let model = train_model(&x_train, &y_train, &config, 11).unwrap();
    let acc = accuracy(&model.predict(&x_test).unwrap(), &y_test).unwrap();
    assert!(acc > 0.9, "file-chain RF accuracy only {acc}");

    // Bundle round trip through disk predicts identically.
    let bundle = ModelBundle::new(&dataset.schema, scaler, None, model, config, 11);
    let model_path = dir.join("model.json");
    bundle.save(&model_path).unwrap();
    let loaded = ModelBundle::<f64>::load(&model_path).unwrap();
    loaded.check_schema(&dataset.schema).unwrap();
    assert_eq!(
        loaded.predict_raw(&dataset.x).unwrap(),
        bundle.predict_raw(&dataset.x).unwrap()
    );

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn scratch_windows_have_higher_std_than_normal() {
    // Generator self-check: the Scratch defect must be learnably separated
    // in dispersion. Compare the central X-axis std of every scratch
    // window against every normal window.
    let corpus_config = CorpusConfig { duration_s: 6.0, ..CorpusConfig::default() };
    let corpus = generate_paper_shaped_corpus::<f64>(99, &corpus_config).unwrap();

    let mut normal_stds = Vec::new();
    let mut scratch_stds = Vec::new();
    for (meta, data) in &corpus {
        let series: Vec<f64> = data.central.iter().map(|r| r.x).collect();
        for window in series.chunks_exact(800) {
            let s = std_dev(window).unwrap();
            match meta.blade_condition {
                BladeCondition::Normal => normal_stds.push(s),
                BladeCondition::DefectType3 => scratch_stds.push(s),
                _ => {}
            }
        }
    }
    assert!(!normal_stds.is_empty() && !scratch_stds.is_empty());
    let mut wins = 0usize;
    let mut total = 0usize;
    for &s in &scratch_stds {
        for &n in &normal_stds {
            total += 1;
            if s > n {
                wins += 1;
            }
        }
    }
    let share = wins as f64 / total as f64;
    assert!(share >= 0.95, "scratch std exceeded normal std in only {share:.3} of pairings");
}

#[test]
fn noise_only_corpus_defeats_no_classifier() {
    // Anti-leakage sanity: with harmonics zeroed nothing but noise is left
    // for crack/trim vs normal, so no model should beat the majority
    // baseline by more than 5 points.
    let corpus_config = CorpusConfig {
        duration_s: 6.0,
        snr: SnrConfig { noise_sigma: 0.05, harmonic_gain: 0.0 },
        ..CorpusConfig::default()
    };
    let corpus = generate_paper_shaped_corpus::<f64>(123, &corpus_config).unwrap();
    let mut pairs = Vec::new();
    for (meta, data) in &corpus {
        let streams = rotorvib_core::ingest::ExperimentStreams {
            central: data.central.clone(),
            outer: data.outer.clone(),
        };
        pairs.extend(rotorvib_core::ingest::pair_windows(&streams, meta, 800).unwrap());
    }
    let (schema, vectors) = extract_corpus(&pairs, &FeatureConfig::default()).unwrap();
    let dataset = Dataset::from_feature_vectors(schema, vectors).unwrap();

    let mut study = StudyConfig::default();
    study.ks = Vec::new(); // no PCA variants needed for this check
    study.model.svm.max_passes = 30;
    let report = run_pca_scenarios(&dataset, &study, 5).unwrap();

    let (normal, defective) = dataset.class_counts();
    let baseline = defective.max(normal) as f64 / dataset.n_rows() as f64;
    for s in &report.scenarios {
        assert!(
            s.accuracy <= baseline + 0.05,
            "{} beat the baseline on noise-only data: {:.4} vs {:.4}",
            s.algorithm,
            s.accuracy,
            baseline
        );
    }
}

#[test]
fn component_sweep_prefers_interior_k() {
    // Reduced-scale corpus; the decision tree's best component count
    // should be an interior point of the 2..=30 sweep, not a boundary.
    use rotorvib_core::analysis::{pca_component_sweep, PcaTarget};
    let corpus_config = CorpusConfig { duration_s: 12.0, ..CorpusConfig::default() };
    let corpus = generate_paper_shaped_corpus::<f64>(31, &corpus_config).unwrap();
    let mut pairs = Vec::new();
    for (meta, data) in &corpus {
        let streams = rotorvib_core::ingest::ExperimentStreams {
            central: data.central.clone(),
            outer: data.outer.clone(),
        };
        pairs.extend(rotorvib_core::ingest::pair_windows(&streams, meta, 800).unwrap());
    }
    let (schema, vectors) = extract_corpus(&pairs, &FeatureConfig::default()).unwrap();
    let dataset = Dataset::from_feature_vectors(schema, vectors).unwrap();

    let config = StudyConfig::default();
    let report =
        pca_component_sweep(&dataset, Algorithm::DecisionTree, PcaTarget::Stft, &config, 13).unwrap();
    assert_eq!(report.scenarios.len(), 29);
    let best = report.best_k.unwrap();
    assert!(best > 2 && best < 30, "sweep argmax {best} sits on the boundary");
}

#[test]
fn magnitude_channel_matches_record_norms() {
    let corpus_config = CorpusConfig { duration_s: 0.5, ..CorpusConfig::default() };
    let corpus = generate_paper_shaped_corpus::<f64>(17, &corpus_config).unwrap();
    let (_, data) = &corpus[0];
    let channel = rotorvib_core::features::magnitude_channel(&data.central);
    assert_eq!(channel.len(), data.central.len());
    for ((ts, magnitude), record) in channel.iter().zip(&data.central) {
        assert_eq!(*ts, record.timestamp_us);
        assert_eq!(record.sensor, Sensor::Central);
        let expected = (record.x * record.x + record.y * record.y + record.z * record.z).sqrt();
        assert_eq!(*magnitude, expected);
    }
}
