//! One-hot, Hadamard and random K-hot codebooks and their distance profiles.
//!
//! cargo run --example baselines

use mute::baseline::{hadamard, one_hot, random_k_hot};
use mute::{hamming_distance, min_pairwise_distance, pairwise_distance_sum, Codebook};

fn profile(name: &str, cb: &Codebook) {
    let n = cb.n_classes();
    let mut max = 0;
    for i in 0..n {
        for j in i + 1..n {
            max = max.max(hamming_distance(cb.code(i), cb.code(j)).unwrap());
        }
    }
    println!(
        "{name:<12} {n:>3} classes x {:>3} bits  min {:>3}  max {:>3}  sum {:>5}",
        cb.n_bits(),
        min_pairwise_distance(cb).unwrap(),
        max,
        pairwise_distance_sum(cb)
    );
}

fn main() {
    profile("one-hot", &one_hot(10).unwrap());
    for m in [6, 7, 8] {
        profile(&format!("H-{}", (1 << m) - 1), &hadamard(10, m).unwrap());
    }
    profile("random 4/10", &random_k_hot(10, 10, 4, 1).unwrap());
    profile("random 8/30", &random_k_hot(10, 30, 8, 1).unwrap());

    println!("\nH-7 rows:");
    for code in hadamard(7, 3).unwrap().codes() {
        println!("  {code}");
    }
}
