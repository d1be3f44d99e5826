//! Turns a confusion matrix into class-similarity weights, then compares a
//! weighted design against reassigning an unweighted design's words.
//!
//! cargo run --release --example similarity_weights

use mute::optimizer::{local_search, weighted_shuffle, OptimizerConfig};
use mute::similarity::{confusion_to_weights, ConfusionMatrix, DEFAULT_FLOOR};
use mute::{hamming_distance, weighted_objective};

fn main() {
    // classes 0/1 and 2/3 are often mistaken for each other
    let cm = ConfusionMatrix::from_rows(&[
        vec![80, 15, 2, 1, 2, 0],
        vec![18, 78, 1, 2, 0, 1],
        vec![1, 2, 85, 10, 1, 1],
        vec![0, 1, 12, 84, 2, 1],
        vec![2, 1, 1, 1, 94, 1],
        vec![1, 0, 1, 2, 1, 95],
    ])
    .unwrap();
    let w = confusion_to_weights(&cm, DEFAULT_FLOOR).unwrap();
    print!("weights (floor {DEFAULT_FLOOR}):\n{}", w.to_csv_string());

    let weighted = local_search(&OptimizerConfig::new(6, 3).with_weights(w.clone()).with_seed(2)).unwrap();
    let plain = local_search(&OptimizerConfig::new(6, 3).with_seed(2)).unwrap();
    let shuffled = weighted_shuffle(&plain.codebook, &w).unwrap();

    for (name, cb) in [
        ("unweighted", &plain.codebook),
        ("shuffled", &shuffled),
        ("weighted", &weighted.codebook),
    ] {
        println!(
            "\n{name}: objective {:.4}, d(0,1) = {}, d(2,3) = {}",
            weighted_objective(cb, &w).unwrap(),
            hamming_distance(cb.code(0), cb.code(1)).unwrap(),
            hamming_distance(cb.code(2), cb.code(3)).unwrap()
        );
        for (class, code) in cb.codes().iter().enumerate() {
            println!("  class {class}: {code}");
        }
    }
}
