//! Exhaustive search against multi-start local search on small instances,
//! plus the best-so-far curve of each restart on a larger one.
//!
//! cargo run --release --example exact_vs_local

use mute::optimizer::{exact_search, local_search, local_search_traced, OptimizerConfig};
use mute::seeding::rng;
use mute::WeightMatrix;
use rand::Rng;

fn random_weights(n: usize, seed: u64) -> WeightMatrix {
    let mut r = rng(seed);
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = r.random_range(0.01..1.0);
            w[i * n + j] = v;
            w[j * n + i] = v;
        }
    }
    WeightMatrix::from_flat(n, w).unwrap()
}

fn main() {
    println!(" N  B  K  exact        local        exact s   local s");
    for (n, b, k) in [(4, 4, 2), (5, 5, 2), (5, 6, 3), (6, 6, 3), (4, 8, 2)] {
        let cfg = OptimizerConfig::new(n, k)
            .with_bits(b)
            .with_weights(random_weights(n, (n * 100 + b) as u64))
            .with_seed(3);
        let e = exact_search(&cfg).unwrap();
        let l = local_search(&cfg).unwrap();
        println!(
            "{n:>2} {b:>2} {k:>2}  {:<12.6} {:<12.6} {:<9.4} {:.4}{}",
            e.objective,
            l.objective,
            e.wall_time.as_secs_f64(),
            l.wall_time.as_secs_f64(),
            if e.objective == l.objective { "" } else { "  (differs)" }
        );
    }

    let mut cfg = OptimizerConfig::new(12, 5)
        .with_bits(16)
        .with_weights(random_weights(12, 7))
        .with_seed(7);
    cfg.restarts = 6;
    let (result, traces) = local_search_traced(&cfg).unwrap();
    println!("\n12 classes, 16 bits, 5-hot: best {:.4}", result.objective);
    for t in &traces {
        let last = t.best_so_far.last().copied().unwrap_or(f64::NAN);
        println!("  restart {:>2}: {:>5} steps, best {last:.4}", t.restart, t.best_so_far.len());
    }
}
