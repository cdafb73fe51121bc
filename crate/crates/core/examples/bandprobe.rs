use rotorvib_core::features::{wavelet_packet_energies, WaveletFilter};
use rotorvib_core::ingest::BladeCondition;
use rotorvib_core::synth::{generate_paper_shaped_corpus, CorpusConfig};

fn main() {
    let config = CorpusConfig { duration_s: 10.0, ..CorpusConfig::default() };
    let corpus = generate_paper_shaped_corpus::<f64>(20_240_001, &config).unwrap();
    let mut per: std::collections::BTreeMap<&str, Vec<Vec<f64>>> = Default::default();
    for (meta, data) in &corpus {
        let kind = match meta.blade_condition {
            BladeCondition::Normal => "normal",
            BladeCondition::DefectType1 => "crack",
            BladeCondition::DefectType2 => "trim",
            BladeCondition::DefectType3 => "scratch",
        };
        let series: Vec<f64> = data.central.iter().map(|r| r.y).collect();
        for w in series.chunks_exact(800) {
            per.entry(kind).or_default().push(wavelet_packet_energies(w, 3, WaveletFilter::Haar).unwrap());
        }
    }
    for (kind, rows) in &per {
        print!("{kind:8}");
        for j in 0..8 {
            let vals: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            let v = (vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / vals.len() as f64).sqrt();
            print!(" n{j}={m:8.2}±{v:6.2}");
        }
        println!();
    }
}
