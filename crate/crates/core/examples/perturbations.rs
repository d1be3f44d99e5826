//! Renders one synthetic digit under each corruption as ASCII art.
//!
//! cargo run --example perturbations

use mute::baseline::one_hot;
use mute::nn::{synthetic_digits, train, MlpModel, TrainConfig, DIGIT_IMAGE_SIDE};
use mute::perturb::PerturbationSpec;

fn show(title: &str, x: &[f64]) {
    println!("{title}");
    for row in x.chunks(DIGIT_IMAGE_SIDE) {
        let line: String = row
            .iter()
            .map(|v| match v {
                v if *v > 0.75 => '#',
                v if *v > 0.5 => '+',
                v if *v > 0.25 => '.',
                _ => ' ',
            })
            .collect();
        println!("  |{line}|");
    }
}

fn main() {
    let data = synthetic_digits(20, 0.05, 3).unwrap();
    let cb = one_hot(10).unwrap();
    let model = MlpModel::new(&[data.dim(), 32, 10], 1).unwrap();
    let cfg = TrainConfig {
        batch_size: 20,
        epochs: 20,
        ..TrainConfig::default()
    };
    let model = train(&model, &data, &cb, &cfg).unwrap().model;

    let sample = 8;
    show("original", data.sample(sample));
    for spec in ["negative", "blur:sigma=1.0", "sp:p=0.05,seed=7", "fgsm:eps=0.2"] {
        let spec: PerturbationSpec = spec.parse().unwrap();
        let out = spec.apply(&data, Some((&model, &cb))).unwrap();
        show(&spec.to_string(), out.sample(sample));
    }
}
