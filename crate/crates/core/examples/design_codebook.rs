//! Designs a 10-class, 10-bit, 4-hot codebook for a random similarity matrix
//! and compares it with one-hot and random 4-hot targets.
//!
//! cargo run --release --example design_codebook [seed]

use mute::baseline::{one_hot, random_k_hot};
use mute::optimizer::{local_search, MinDistanceFloor, OptimizerConfig};
use mute::seeding::rng;
use mute::{min_pairwise_distance, weighted_objective, Codebook, WeightMatrix};
use rand::Rng;

fn describe(name: &str, cb: &Codebook, w: &WeightMatrix) {
    println!(
        "{name:<10} width {:>2}  objective {:>8.3}  min distance {}",
        cb.n_bits(),
        weighted_objective(cb, w).unwrap(),
        min_pairwise_distance(cb).unwrap()
    );
}

fn main() {
    let seed: u64 = std::env::args().nth(1).map_or(1, |s| s.parse().unwrap());
    let mut r = rng(seed);
    let n = 10;
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = r.random_range(0.05..1.0);
            w[i * n + j] = v;
            w[j * n + i] = v;
        }
    }
    let w = WeightMatrix::from_flat(n, w).unwrap();

    let cfg = OptimizerConfig::new(n, 4)
        .with_weights(w.clone())
        .with_seed(seed)
        .with_floor(MinDistanceFloor::Auto);
    let result = local_search(&cfg).unwrap();
    println!(
        "local search: {} restarts, {} proposals, {:.3}s, distance floor {:?}\n",
        result.restarts_used,
        result.iterations,
        result.wall_time.as_secs_f64(),
        result.floor
    );
    for (class, code) in result.codebook.codes().iter().enumerate() {
        println!("  class {class}: {code}");
    }
    println!();
    describe("optimized", &result.codebook, &w);
    describe("one-hot", &one_hot(n).unwrap(), &w);
    describe("random", &random_k_hot(n, n, 4, seed).unwrap(), &w);
}
