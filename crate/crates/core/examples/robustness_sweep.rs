//! One-hot vs. unweighted and weighted 3-hot targets on overlapping Gaussian
//! blobs, scored on clean, FGSM and salt-and-pepper test sets.
//!
//! cargo run --release --example robustness_sweep [spread] [seeds] [epochs] [hidden] [batch]

use mute::baseline::one_hot;
use mute::nn::{evaluate, train, BlobSpec, Dataset, MlpModel, TrainConfig};
use mute::optimizer::{local_search, MinDistanceFloor, OptimizerConfig};
use mute::perturb::{PerturbationKind, PerturbationSpec};
use mute::similarity::{confusion_to_weights, estimate_confusion, DEFAULT_FLOOR};
use mute::{min_pairwise_distance, Codebook};

fn fit(
    train_set: &Dataset,
    cb: &Codebook,
    seed: u64,
    (epochs, hidden, batch_size): (usize, usize, usize),
) -> MlpModel {
    let model = MlpModel::new(&[train_set.dim(), hidden, cb.n_bits()], seed).unwrap();
    let cfg = TrainConfig {
        batch_size,
        epochs,
        seed,
        ..TrainConfig::default()
    };
    train(&model, train_set, cb, &cfg).unwrap().model
}

fn main() {
    let mut args = std::env::args().skip(1);
    let spread: f64 = args.next().map_or(0.15, |s| s.parse().unwrap());
    let seeds: u64 = args.next().map_or(5, |s| s.parse().unwrap());
    let epochs: usize = args.next().map_or(100, |s| s.parse().unwrap());
    let hidden: usize = args.next().map_or(32, |s| s.parse().unwrap());
    let batch: usize = args.next().map_or(32, |s| s.parse().unwrap());
    let shape = (epochs, hidden, batch);
    let attacks = [
        PerturbationSpec::new(PerturbationKind::Fgsm { epsilon: 0.1 }),
        PerturbationSpec::new(PerturbationKind::SaltPepper { p: 0.05, seed: 11 }),
    ];

    println!("seed  code      clean   fgsm    s&p");
    for seed in 0..seeds {
        let spec = BlobSpec::new(6, 16, spread, 100 + seed);
        let train_set = spec.sample(100, 0).unwrap();
        let held_out = spec.sample(100, 1).unwrap();
        let test_set = spec.sample(100, 2).unwrap();

        let onehot = one_hot(6).unwrap();
        let onehot_model = fit(&train_set, &onehot, seed, shape);
        let confusion = estimate_confusion(&onehot_model, &held_out).unwrap();
        let weights = confusion_to_weights(&confusion, DEFAULT_FLOOR).unwrap();

        let base = OptimizerConfig::new(6, 3).with_seed(seed).with_floor(MinDistanceFloor::Auto);
        let plain = local_search(&base).unwrap().codebook;
        let weighted = local_search(&base.clone().with_weights(weights)).unwrap().codebook;

        for (name, cb, model) in [
            ("one-hot", onehot.clone(), Some(onehot_model)),
            ("3-hot", plain, None),
            ("w-3-hot", weighted, None),
        ] {
            let model = model.unwrap_or_else(|| fit(&train_set, &cb, seed, shape));
            let clean = evaluate(&model, &test_set, &cb).unwrap().accuracy;
            let mut row = format!("{seed:<5} {name:<9} {clean:.3}");
            for a in &attacks {
                let noisy = a.apply(&test_set, Some((&model, &cb))).unwrap();
                row += &format!("   {:.3}", evaluate(&model, &noisy, &cb).unwrap().accuracy);
            }
            println!("{row}   (min distance {})", min_pairwise_distance(&cb).unwrap());
        }
    }
}
