//! Stratified train/test splitting.
//!
//! Splitting happens before any fitting, so downstream transforms can only
//! ever see training rows. Within each class the rows are shuffled with a
//! seeded generator and the first `round(fraction * count)` go to training,
//! which keeps class proportions in both partitions within one row of the
//! global proportion.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::seed;

use super::PipelineError;

/// Row indices of the two partitions, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Granularity of the split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// Stratify individual rows (windows). Windows of one experiment may
    /// straddle the partitions.
    Window,
    /// Assign whole experiments to one partition, stratified by class.
    Experiment,
}

fn validate_labels(labels: &[u8], train_fraction: f64) -> Result<(), PipelineError> {
    if labels.is_empty() {
        return Err(PipelineError::EmptyDataset);
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(PipelineError::InvalidFraction(train_fraction));
    }
    let first = labels[0];
    if labels.iter().all(|&l| l == first) {
        return Err(PipelineError::SingleClass);
    }
    Ok(())
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Stratified row-level split. Reproducible: the same seed yields the same
/// index sets.
pub fn stratified_split(
    labels: &[u8],
    train_fraction: f64,
    master_seed: u64,
) -> Result<Split, PipelineError> {
    validate_labels(labels, train_fraction)?;

    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [0u8, 1] {
        let mut indices: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        if indices.is_empty() {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, class as u64));
        indices.shuffle(&mut rng);
        let n_train = round_half_up(train_fraction * indices.len() as f64);
        train.extend_from_slice(&indices[..n_train]);
        test.extend_from_slice(&indices[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

/// Stratified split at experiment granularity: every experiment's rows land
/// wholly in one partition. Experiments are stratified by their class.
pub fn stratified_split_by_experiment(
    labels: &[u8],
    experiment_ids: &[String],
    train_fraction: f64,
    master_seed: u64,
) -> Result<Split, PipelineError> {
    validate_labels(labels, train_fraction)?;
    assert_eq!(labels.len(), experiment_ids.len());

    // Experiments in first-appearance order, with their class.
    let mut experiments: Vec<(&str, u8)> = Vec::new();
    for (id, &label) in experiment_ids.iter().zip(labels) {
        if !experiments.iter().any(|(e, _)| *e == id.as_str()) {
            experiments.push((id.as_str(), label));
        }
    }

    let mut train_experiments: Vec<&str> = Vec::new();
    for class in [0u8, 1] {
        let mut of_class: Vec<&str> = experiments
            .iter()
            .filter(|(_, l)| *l == class)
            .map(|(e, _)| *e)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, 0x100 + class as u64));
        of_class.shuffle(&mut rng);
        let n_train = round_half_up(train_fraction * of_class.len() as f64);
        train_experiments.extend_from_slice(&of_class[..n_train]);
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, id) in experiment_ids.iter().enumerate() {
        if train_experiments.contains(&id.as_str()) {
            train.push(i);
        } else {
            test.push(i);
        }
    }
    if train.is_empty() || test.is_empty() {
        return Err(PipelineError::SingleClass);
    }
    Ok(Split { train, test })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_shaped_labels() -> Vec<u8> {
        let mut labels = vec![0u8; 480];
        labels.extend(vec![1u8; 1080]);
        labels
    }

    #[test]
    fn paper_shaped_counts() {
        let labels = paper_shaped_labels();
        let split = stratified_split(&labels, 0.7, 7).unwrap();
        assert_eq!(split.train.len(), 1092);
        assert_eq!(split.test.len(), 468);
        let train_normal = split.train.iter().filter(|&&i| labels[i] == 0).count();
        let test_normal = split.test.iter().filter(|&&i| labels[i] == 0).count();
        assert_eq!(train_normal, 336);
        assert_eq!(test_normal, 144);
    }

    #[test]
    fn deterministic_given_seed() {
        let labels = paper_shaped_labels();
        assert_eq!(stratified_split(&labels, 0.7, 3).unwrap(), stratified_split(&labels, 0.7, 3).unwrap());
        assert_ne!(stratified_split(&labels, 0.7, 3).unwrap(), stratified_split(&labels, 0.7, 4).unwrap());
    }

    #[test]
    fn partitions_are_disjoint_and_complete() {
        let labels = paper_shaped_labels();
        let split = stratified_split(&labels, 0.7, 11).unwrap();
        let mut all: Vec<usize> = split.train.iter().chain(&split.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
    }

    #[test]
    fn single_class_rejected() {
        let err = stratified_split(&[1u8; 10], 0.7, 0).unwrap_err();
        assert!(matches!(err, PipelineError::SingleClass));
        assert!(matches!(stratified_split(&[], 0.7, 0), Err(PipelineError::EmptyDataset)));
        assert!(matches!(stratified_split(&[0, 1], 1.0, 0), Err(PipelineError::InvalidFraction(_))));
    }

    #[test]
    fn experiment_split_keeps_groups_whole() {
        let mut labels = Vec::new();
        let mut ids = Vec::new();
        for e in 0..10 {
            for _ in 0..6 {
                labels.push(if e < 4 { 0 } else { 1 });
                ids.push(format!("exp{e}"));
            }
        }
        let split = stratified_split_by_experiment(&labels, &ids, 0.7, 5).unwrap();
        for part in [&split.train, &split.test] {
            for &i in part {
                let id = &ids[i];
                // Every row of this experiment must be in the same part.
                let all_here = (0..labels.len())
                    .filter(|&j| &ids[j] == id)
                    .all(|j| part.contains(&j));
                assert!(all_here, "experiment {id} straddles the split");
            }
        }
    }
}
