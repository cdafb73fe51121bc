use rotorvib_core::analysis::*;
use rotorvib_core::features::{extract_corpus, std_dev, FeatureConfig, FeatureFamily};
use rotorvib_core::ingest::{pair_windows, BladeCondition, ExperimentStreams};
use rotorvib_core::models::Algorithm;
use rotorvib_core::pipeline::Dataset;
use rotorvib_core::synth::{generate_paper_shaped_corpus, CorpusConfig};

fn main() {
    let duration: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20.0);
    let seed: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(20_240_001);
    let t0 = std::time::Instant::now();
    let corpus_config = CorpusConfig { duration_s: duration, ..CorpusConfig::default() };
    let corpus = generate_paper_shaped_corpus::<f64>(seed, &corpus_config).unwrap();

    // scratch-vs-normal std pairings
    let mut normal_stds = Vec::new();
    let mut scratch_stds = Vec::new();
    for (meta, data) in &corpus {
        let series: Vec<f64> = data.central.iter().map(|r| r.x).collect();
        for w in series.chunks_exact(800) {
            let s = std_dev(w).unwrap();
            match meta.blade_condition {
                BladeCondition::Normal => normal_stds.push(s),
                BladeCondition::DefectType3 => scratch_stds.push(s),
                _ => {}
            }
        }
    }
    let mut wins = 0usize;
    for &s in &scratch_stds { for &n in &normal_stds { if s > n { wins += 1; } } }
    println!("scratch>normal std pairings: {:.4}", wins as f64 / (scratch_stds.len()*normal_stds.len()) as f64);

    let mut pairs = Vec::new();
    for (meta, data) in &corpus {
        let streams = ExperimentStreams { central: data.central.clone(), outer: data.outer.clone() };
        pairs.extend(pair_windows(&streams, meta, 800).unwrap());
    }
    let (schema, vectors) = extract_corpus(&pairs, &FeatureConfig::default()).unwrap();
    let dataset = Dataset::from_feature_vectors(schema, vectors).unwrap();
    println!("dataset {}x{} gen+extract {:.1?}", dataset.n_rows(), dataset.n_cols(), t0.elapsed());

    let config = StudyConfig::default();
    let scen = run_pca_scenarios(&dataset, &config, 77).unwrap();
    for s in &scen.scenarios {
        if s.id == "no_pca" { println!("no_pca       {:<14} acc={:.4}", s.algorithm, s.accuracy); }
    }
    for s in &scen.scenarios {
        if s.id == "stft_pca" { println!("stft_pca k={:<3} {:<12} acc={:.4}", s.k.unwrap(), s.algorithm, s.accuracy); }
    }
    for s in &scen.scenarios {
        if s.id == "all_pca" && s.algorithm == "random_forest" { println!("all_pca  k={:<3} {:<12} acc={:.4}", s.k.unwrap(), s.algorithm, s.accuracy); }
    }

    let iso = run_feature_isolation(&dataset, &config, 77).unwrap();
    for fam in [FeatureFamily::Stft, FeatureFamily::TimeDomain, FeatureFamily::Wavelet] {
        println!("isolation best {:<12} = {:.4}", fam.name(), best_isolation_accuracy(&iso, fam).unwrap());
        let id = format!("isolation_{}", fam.name());
        for s in iso.scenarios.iter().filter(|s| s.id == id) {
            println!("    {:<14} k={:<4?} acc={:.4}", s.algorithm, s.k, s.accuracy);
        }
    }

    for fam in [FeatureFamily::TimeDomain, FeatureFamily::Wavelet] {
        family_recall(&dataset, fam, &dataset.experiment_ids);
    }
    for kind in ["crack", "trim"] {
        effect_sizes(&dataset, FeatureFamily::Wavelet, kind);
    }

    let sweep = pca_component_sweep(&dataset, Algorithm::DecisionTree, PcaTarget::Stft, &config, 13).unwrap();
    let accs: Vec<String> = sweep.scenarios.iter().map(|s| format!("{}:{:.3}", s.k.unwrap(), s.accuracy)).collect();
    println!("DT sweep: {}", accs.join(" "));
    println!("DT sweep best_k={:?}", sweep.best_k);
    println!("total {:.1?}", t0.elapsed());
}

// Per-condition recall of an RF trained on one isolated family.
fn family_recall(dataset: &Dataset<f64>, family: FeatureFamily, ids: &[String]) {
    use rotorvib_core::models::{train_model, Algorithm, ModelConfig};
    use rotorvib_core::pipeline::{stratified_split, Scaler};
    let iso = dataset.select_family(family).unwrap();
    let split = stratified_split(&iso.labels, 0.7, 77).unwrap();
    let xtr_raw = iso.x.select_rows(&split.train);
    let xte_raw = iso.x.select_rows(&split.test);
    let ytr: Vec<u8> = split.train.iter().map(|&i| iso.labels[i]).collect();
    let yte: Vec<u8> = split.test.iter().map(|&i| iso.labels[i]).collect();
    let scaler = Scaler::fit(&xtr_raw).unwrap();
    let xtr = scaler.apply(&xtr_raw).unwrap();
    let xte = scaler.apply(&xte_raw).unwrap();
    let model = train_model(&xtr, &ytr, &ModelConfig::for_algorithm(Algorithm::RandomForest), 5).unwrap();
    let preds = model.predict(&xte).unwrap();
    let mut per: std::collections::BTreeMap<String, (usize, usize)> = Default::default();
    for ((&i, &p), &y) in split.test.iter().zip(&preds).zip(&yte) {
        let kind = ids[i].trim_end_matches(|c: char| c.is_ascii_digit() || c == '_' || c == 'r' || c == 'u' || c == 'n').to_string();
        let e = per.entry(kind).or_default();
        e.1 += 1;
        if p == y { e.0 += 1; }
    }
    print!("  {:<12} recall:", family.name());
    for (kind, (ok, n)) in &per { print!(" {kind}={:.2}", *ok as f64 / *n as f64); }
    println!();
}


// Cohen's d of each isolated-family column: `kind` experiments vs normal.
fn effect_sizes(dataset: &Dataset<f64>, family: FeatureFamily, kind: &str) {
    let iso = dataset.select_family(family).unwrap();
    let in_kind: Vec<usize> = (0..iso.n_rows())
        .filter(|&i| iso.experiment_ids[i].starts_with(kind))
        .collect();
    let normal: Vec<usize> = (0..iso.n_rows())
        .filter(|&i| iso.experiment_ids[i].starts_with("normal"))
        .collect();
    let stats = |rows: &[usize], j: usize| {
        let vals: Vec<f64> = rows.iter().map(|&i| iso.x.get(i, j)).collect();
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        let v = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / vals.len() as f64;
        (m, v.sqrt())
    };
    let mut effects: Vec<(f64, usize)> = (0..iso.n_cols())
        .map(|j| {
            let (m1, s1) = stats(&in_kind, j);
            let (m0, s0) = stats(&normal, j);
            let pooled = ((s0 * s0 + s1 * s1) / 2.0).sqrt().max(1e-12);
            (((m1 - m0) / pooled).abs(), j)
        })
        .collect();
    effects.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    print!("  wavelet effect sizes vs {kind}:");
    for (d, j) in effects.iter().take(6) {
        print!(" {}={:.2}", iso.schema.descriptors()[*j].name, d);
    }
    println!();
}
