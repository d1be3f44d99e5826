use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::dataset::Dataset;
use super::loss::{DecodeRule, Decoder};
use super::model::MlpModel;
use crate::codebook::Codebook;
use crate::error::{check_dim, Error, Result};
use crate::seeding::rng;
use crate::similarity::ConfusionMatrix;

/// Mini-batch SGD with momentum and L2 weight decay.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            momentum: 0.9,
            weight_decay: 1e-4,
            batch_size: 128,
            epochs: 50,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// A zero learning rate is accepted so that frozen runs can be checked.
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidArgument(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "weight decay must be finite and non-negative, got {}",
                self.weight_decay
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: MlpModel,
    /// Mean training loss of each epoch, measured while the epoch ran.
    pub loss_trace: Vec<f64>,
}

impl TrainOutcome {
    pub fn write_trace(&self, path: impl AsRef<Path>, footer: Option<&str>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, loss_trace_csv(&self.loss_trace, footer))
            .map_err(|e| Error::file(path, e))
    }
}

/// `epoch,mean_loss` CSV; `footer` lines are appended as `#` comments.
pub fn loss_trace_csv(trace: &[f64], footer: Option<&str>) -> String {
    let mut out = String::from("epoch,mean_loss\n");
    for (e, l) in trace.iter().enumerate() {
        out.push_str(&format!("{},{}\n", e + 1, l));
    }
    if let Some(f) = footer {
        for line in f.lines() {
            out.push_str(&format!("# {line}\n"));
        }
    }
    out
}

fn check_compat(model: &MlpModel, data: &Dataset, codebook: &Codebook) -> Result<()> {
    check_dim("codebook class count", data.n_classes(), codebook.n_classes())?;
    check_dim("model output width", codebook.n_bits(), model.output_dim())?;
    check_dim("model input width", data.dim(), model.input_dim())
}

/// Trains a copy of `model` so each sample's output approaches its class codeword.
pub fn train(
    model: &MlpModel,
    data: &Dataset,
    codebook: &Codebook,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    check_compat(model, data, codebook)?;
    let targets: Vec<Vec<f64>> = codebook.codes().iter().map(|c| c.to_targets()).collect();
    let mut model = model.clone();
    let mut velocity_w: Vec<Vec<f64>> = model.weights().iter().map(|w| vec![0.0; w.len()]).collect();
    let mut velocity_b: Vec<Vec<f64>> = model.biases().iter().map(|b| vec![0.0; b.len()]).collect();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut r = rng(cfg.seed);
    let mut trace = Vec::with_capacity(cfg.epochs);
    let mut sample_loss = vec![0.0; data.len()];

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut r);
        for batch in order.chunks(cfg.batch_size) {
            let mut acc_w: Vec<Vec<f64>> = velocity_w.iter().map(|v| vec![0.0; v.len()]).collect();
            let mut acc_b: Vec<Vec<f64>> = velocity_b.iter().map(|v| vec![0.0; v.len()]).collect();
            for &s in batch {
                let (loss, g, _) = model.backprop(data.sample(s), &targets[data.labels()[s]])?;
                sample_loss[s] = loss;
                for (a, gl) in acc_w.iter_mut().zip(&g.weights) {
                    a.iter_mut().zip(gl).for_each(|(a, g)| *a += g);
                }
                for (a, gl) in acc_b.iter_mut().zip(&g.biases) {
                    a.iter_mut().zip(gl).for_each(|(a, g)| *a += g);
                }
            }
            let scale = 1.0 / batch.len() as f64;
            for (l, (w, b)) in model.params_mut().enumerate() {
                for ((p, v), g) in w.iter_mut().zip(velocity_w[l].iter_mut()).zip(&acc_w[l]) {
                    *v = cfg.momentum * *v + (g * scale + cfg.weight_decay * *p);
                    *p -= cfg.learning_rate * *v;
                }
                for ((p, v), g) in b.iter_mut().zip(velocity_b[l].iter_mut()).zip(&acc_b[l]) {
                    *v = cfg.momentum * *v + (g * scale + cfg.weight_decay * *p);
                    *p -= cfg.learning_rate * *v;
                }
            }
        }
        // summed in sample order so frozen runs report identical values
        let mean = sample_loss.iter().sum::<f64>() / data.len() as f64;
        let diverged = !mean.is_finite()
            || model
                .weights()
                .iter()
                .chain(model.biases())
                .any(|w| w.iter().any(|v| !v.is_finite()));
        if diverged {
            return Err(Error::Divergence {
                epoch: epoch + 1,
                loss: mean,
            });
        }
        trace.push(mean);
    }
    Ok(TrainOutcome {
        model,
        loss_trace: trace,
    })
}

/// Accuracy and confusion counts of a model on a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
}

/// Class predicted for every sample, in dataset order.
pub fn predict(
    model: &MlpModel,
    data: &Dataset,
    codebook: &Codebook,
    rule: DecodeRule,
) -> Result<Vec<usize>> {
    check_compat(model, data, codebook)?;
    let decoder = Decoder::new(codebook, rule);
    (0..data.len())
        .into_par_iter()
        .map(|i| decoder.decode(&model.forward(data.sample(i))?))
        .collect()
}

pub fn evaluate(model: &MlpModel, data: &Dataset, codebook: &Codebook) -> Result<Evaluation> {
    evaluate_with(model, data, codebook, DecodeRule::Bce)
}

pub fn evaluate_with(
    model: &MlpModel,
    data: &Dataset,
    codebook: &Codebook,
    rule: DecodeRule,
) -> Result<Evaluation> {
    let predicted = predict(model, data, codebook, rule)?;
    let confusion = ConfusionMatrix::from_predictions(data.n_classes(), data.labels(), &predicted)?;
    let accuracy = confusion.trace() as f64 / data.len() as f64;
    Ok(Evaluation {
        accuracy,
        confusion,
    })
}
