use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::seeding::rng;

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Dense network with ReLU hidden layers and a sigmoid per output bit.
///
/// `weights[l]` is row-major `layer_sizes[l+1] x layer_sizes[l]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpModel {
    layer_sizes: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

/// Parameter gradients laid out like the model.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    /// Same order as [`MlpModel::params`].
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

struct Trace {
    // activations[0] is the input; activations[l+1] is the output of layer l
    activations: Vec<Vec<f64>>,
}

impl MlpModel {
    /// Glorot-uniform weights, zero biases.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        let mut model = Self::zeros(layer_sizes)?;
        let mut r = rng(seed);
        for (l, w) in model.weights.iter_mut().enumerate() {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for v in w.iter_mut() {
                *v = r.random_range(-limit..=limit);
            }
        }
        Ok(model)
    }

    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "layer sizes need an input and an output width, all positive: {layer_sizes:?}"
            )));
        }
        let weights = layer_sizes
            .windows(2)
            .map(|p| vec![0.0; p[0] * p[1]])
            .collect();
        let biases = layer_sizes[1..].iter().map(|&n| vec![0.0; n]).collect();
        Ok(MlpModel {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().zip(&self.biases).map(|(w, b)| w.len() + b.len()).sum()
    }

    /// All parameters, layer by layer: weights then biases.
    pub fn params(&self) -> Vec<f64> {
        Gradients {
            weights: self.weights.clone(),
            biases: self.biases.clone(),
        }
        .flat()
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        check_dim("parameter vector", self.n_params(), params.len())?;
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("model parameters"));
        }
        let mut at = 0;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            let (nw, nb) = (w.len(), b.len());
            w.copy_from_slice(&params[at..at + nw]);
            at += nw;
            b.copy_from_slice(&params[at..at + nb]);
            at += nb;
        }
        Ok(())
    }

    fn trace(&self, x: &[f64]) -> Trace {
        let mut activations = Vec::with_capacity(self.weights.len() + 1);
        activations.push(x.to_vec());
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let input = &activations[l];
            let fan_in = input.len();
            let out: Vec<f64> = b
                .iter()
                .enumerate()
                .map(|(o, &bias)| {
                    let row = &w[o * fan_in..(o + 1) * fan_in];
                    let z = bias + row.iter().zip(input).map(|(a, b)| a * b).sum::<f64>();
                    if l == last {
                        sigmoid(z)
                    } else {
                        z.max(0.0)
                    }
                })
                .collect();
            activations.push(out);
        }
        Trace { activations }
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        check_dim("model input width", self.input_dim(), x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("model input"));
        }
        Ok(())
    }

    /// Per-bit probabilities for one sample.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.trace(x).activations.pop().unwrap())
    }

    /// Row-major batch of samples in, row-major batch of probabilities out.
    pub fn forward_batch(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let d = self.input_dim();
        if !xs.len().is_multiple_of(d) {
            return Err(Error::DimensionMismatch {
                context: "batch width",
                expected: d,
                found: xs.len() % d,
            });
        }
        let mut out = Vec::with_capacity(xs.len() / d * self.output_dim());
        for x in xs.chunks(d) {
            out.extend(self.forward(x)?);
        }
        Ok(out)
    }

    /// Loss of one sample against `target` (0/1 values), its parameter
    /// gradients and its input gradient.
    pub fn backprop(&self, x: &[f64], target: &[f64]) -> Result<(f64, Gradients, Vec<f64>)> {
        self.check_input(x)?;
        check_dim("target width", self.output_dim(), target.len())?;
        let trace = self.trace(x);
        let probs = trace.activations.last().unwrap();
        let loss = super::loss::bce_loss_values(probs, target);
        let nb = target.len() as f64;
        // derivative of the mean BCE through the sigmoid
        let mut delta: Vec<f64> = probs.iter().zip(target).map(|(p, t)| (p - t) / nb).collect();

        let n_layers = self.weights.len();
        let mut gw: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
        let mut gb: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
        let mut input_grad = Vec::new();
        for l in (0..n_layers).rev() {
            let input = &trace.activations[l];
            let fan_in = input.len();
            let w = &self.weights[l];
            let mut g = vec![0.0; w.len()];
            for (o, &d) in delta.iter().enumerate() {
                for (i, &a) in input.iter().enumerate() {
                    g[o * fan_in + i] = d * a;
                }
            }
            let mut prev = vec![0.0; fan_in];
            for (o, &d) in delta.iter().enumerate() {
                for (i, p) in prev.iter_mut().enumerate() {
                    *p += w[o * fan_in + i] * d;
                }
            }
            gw.push(g);
            gb.push(delta);
            if l == 0 {
                input_grad = prev;
                break;
            }
            for (p, &a) in prev.iter_mut().zip(input) {
                if a <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
        gw.reverse();
        gb.reverse();
        Ok((
            loss,
            Gradients {
                weights: gw,
                biases: gb,
            },
            input_grad,
        ))
    }

    pub(crate) fn params_mut(&mut self) -> impl Iterator<Item = (&mut Vec<f64>, &mut Vec<f64>)> {
        self.weights.iter_mut().zip(self.biases.iter_mut())
    }

    fn check(&self) -> Result<()> {
        let fresh = Self::zeros(&self.layer_sizes)?;
        if self.weights.len() != fresh.weights.len() || self.biases.len() != fresh.biases.len() {
            return Err(Error::parse("layers", "layer count does not match layer_sizes"));
        }
        for l in 0..fresh.weights.len() {
            if self.weights[l].len() != fresh.weights[l].len() {
                return Err(Error::parse(
                    format!("weights[{l}]"),
                    format!(
                        "expected {} values, found {}",
                        fresh.weights[l].len(),
                        self.weights[l].len()
                    ),
                ));
            }
            if self.biases[l].len() != fresh.biases[l].len() {
                return Err(Error::parse(
                    format!("biases[{l}]"),
                    format!(
                        "expected {} values, found {}",
                        fresh.biases[l].len(),
                        self.biases[l].len()
                    ),
                ));
            }
        }
        if self.params().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(())
    }

    /// Checkpoint JSON: `layer_sizes`, `weights` and `biases`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: MlpModel = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        model.check()?;
        Ok(model)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::file(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_json(&text)
    }
}
