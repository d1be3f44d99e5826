//! Confusion-driven pipeline: one-hot baseline, weights from its confusion,
//! weighted codebook, training, and a report over several corrupted test sets.
//!
//! cargo run --release --example full_pipeline

use std::time::Instant;

use mute::baseline::one_hot;
use mute::nn::{evaluate, synthetic_digits, train, MlpModel, TrainConfig};
use mute::optimizer::{local_search, MinDistanceFloor, OptimizerConfig};
use mute::perturb::PerturbationSpec;
use mute::report::{AccuracyRow, RunReport};
use mute::similarity::{confusion_to_weights, estimate_confusion, DEFAULT_FLOOR};
use mute::{min_pairwise_distance, weighted_objective};

fn main() {
    let train_set = synthetic_digits(60, 0.25, 10).unwrap();
    let held_out = synthetic_digits(30, 0.25, 11).unwrap();
    let test_set = synthetic_digits(40, 0.25, 12).unwrap();
    let cfg = TrainConfig {
        batch_size: 32,
        epochs: 60,
        seed: 1,
        ..TrainConfig::default()
    };
    let fit = |bits: usize, cb: &mute::Codebook| {
        let model = MlpModel::new(&[train_set.dim(), 48, bits], 1).unwrap();
        train(&model, &train_set, cb, &cfg).unwrap().model
    };

    let baseline_model = fit(10, &one_hot(10).unwrap());
    let confusion = estimate_confusion(&baseline_model, &held_out).unwrap();
    let w = confusion_to_weights(&confusion, DEFAULT_FLOOR).unwrap();
    let design = local_search(
        &OptimizerConfig::new(10, 4)
            .with_bits(12)
            .with_weights(w.clone())
            .with_seed(1)
            .with_floor(MinDistanceFloor::Auto),
    )
    .unwrap();
    let cb = design.codebook;
    let model = fit(cb.n_bits(), &cb);

    let mut results = Vec::new();
    for label in ["original", "negative", "blur:sigma=1", "sp:p=0.05,seed=3", "fgsm:eps=0.1"] {
        let start = Instant::now();
        let data = match label {
            "original" => test_set.clone(),
            s => s.parse::<PerturbationSpec>().unwrap().apply(&test_set, Some((&model, &cb))).unwrap(),
        };
        results.push(AccuracyRow {
            test_set: label.into(),
            samples: data.len(),
            accuracy: evaluate(&model, &data, &cb).unwrap().accuracy,
            confusion_file: None,
            wall_time: start.elapsed(),
        });
    }
    let report = RunReport {
        codebook: "(in memory)".into(),
        model: "(in memory)".into(),
        dataset: "synthetic digits".into(),
        provenance: cb.provenance(),
        n_classes: cb.n_classes(),
        n_bits: cb.n_bits(),
        objective: weighted_objective(&cb, &w).unwrap(),
        objective_weights: "confusion of the one-hot baseline".into(),
        min_distance: min_pairwise_distance(&cb).unwrap(),
        results,
    };
    print!("{}", report.to_table());
}
