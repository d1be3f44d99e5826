//! Trains a network on synthetic digit images against one-hot and 4-hot
//! targets and decodes with both the cross-entropy and Hamming rules.
//!
//! cargo run --release --example train_and_decode

use mute::baseline::one_hot;
use mute::nn::{evaluate_with, synthetic_digits, train, DecodeRule, MlpModel, TrainConfig};
use mute::optimizer::{local_search, MinDistanceFloor, OptimizerConfig};
use mute::min_pairwise_distance;

fn main() {
    let train_set = synthetic_digits(60, 0.25, 1).unwrap();
    let test_set = synthetic_digits(40, 0.25, 2).unwrap();
    let mute_cb = local_search(
        &OptimizerConfig::new(10, 4)
            .with_bits(12)
            .with_seed(1)
            .with_floor(MinDistanceFloor::Auto),
    )
    .unwrap()
    .codebook;

    let cfg = TrainConfig {
        batch_size: 32,
        epochs: 40,
        seed: 5,
        ..TrainConfig::default()
    };
    for (name, cb) in [("one-hot", one_hot(10).unwrap()), ("4-hot", mute_cb)] {
        let model = MlpModel::new(&[train_set.dim(), 48, cb.n_bits()], 5).unwrap();
        let out = train(&model, &train_set, &cb, &cfg).unwrap();
        let bce = evaluate_with(&out.model, &test_set, &cb, DecodeRule::Bce).unwrap();
        let ham = evaluate_with(&out.model, &test_set, &cb, DecodeRule::Hamming).unwrap();
        println!(
            "{name:<8} {:>2} bits, min distance {}: loss {:.4} -> {:.4}, test accuracy {:.3} (bce) {:.3} (hamming)",
            cb.n_bits(),
            min_pairwise_distance(&cb).unwrap(),
            out.loss_trace[0],
            out.loss_trace.last().unwrap(),
            bce.accuracy,
            ham.accuracy
        );
    }
}
