use crate::codebook::Codebook;
use crate::codeword::Codeword;
use crate::error::{check_dim, Result};

/// Probabilities are kept this far from 0 and 1 inside logarithms.
pub const PROB_CLAMP: f64 = 1e-7;

fn clamp(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

pub(crate) fn bce_loss_values(probs: &[f64], target: &[f64]) -> f64 {
    let total: f64 = probs
        .iter()
        .zip(target)
        .map(|(&p, &t)| {
            let p = clamp(p);
            -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
        })
        .sum();
    total / probs.len() as f64
}

/// Mean per-bit binary cross-entropy.
pub fn bce_loss(probs: &[f64], target: &Codeword) -> Result<f64> {
    check_dim("probability width", target.len(), probs.len())?;
    Ok(bce_loss_values(probs, &target.to_targets()))
}

/// How an output vector is mapped back to a class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DecodeRule {
    /// Codeword with the smallest cross-entropy against the probabilities.
    #[default]
    Bce,
    /// Threshold at 0.5, then nearest codeword in Hamming distance.
    Hamming,
}

/// Decoder with per-codebook tables precomputed.
#[derive(Clone, Debug)]
pub struct Decoder {
    rule: DecodeRule,
    n_bits: usize,
    codes: Vec<Vec<bool>>,
}

impl Decoder {
    pub fn new(codebook: &Codebook, rule: DecodeRule) -> Self {
        Decoder {
            rule,
            n_bits: codebook.n_bits(),
            codes: codebook.codes().iter().map(|c| c.bits().collect()).collect(),
        }
    }

    /// Per-class scores, lower is better.
    pub fn scores(&self, probs: &[f64]) -> Result<Vec<f64>> {
        check_dim("probability width", self.n_bits, probs.len())?;
        Ok(match self.rule {
            DecodeRule::Bce => {
                let on: Vec<f64> = probs.iter().map(|&p| -clamp(p).ln()).collect();
                let off: Vec<f64> = probs.iter().map(|&p| -(1.0 - clamp(p)).ln()).collect();
                self.codes
                    .iter()
                    .map(|c| {
                        c.iter()
                            .enumerate()
                            .map(|(b, &bit)| if bit { on[b] } else { off[b] })
                            .sum()
                    })
                    .collect()
            }
            DecodeRule::Hamming => {
                let hard: Vec<bool> = probs.iter().map(|&p| p >= 0.5).collect();
                self.codes
                    .iter()
                    .map(|c| c.iter().zip(&hard).filter(|(a, b)| a != b).count() as f64)
                    .collect()
            }
        })
    }

    /// Best class; ties go to the lowest id.
    pub fn decode(&self, probs: &[f64]) -> Result<usize> {
        let scores = self.scores(probs)?;
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate().skip(1) {
            if s < scores[best] {
                best = i;
            }
        }
        Ok(best)
    }
}

/// Decodes with the default cross-entropy rule.
pub fn decode(probs: &[f64], codebook: &Codebook) -> Result<usize> {
    Decoder::new(codebook, DecodeRule::Bce).decode(probs)
}

pub fn decode_with(probs: &[f64], codebook: &Codebook, rule: DecodeRule) -> Result<usize> {
    Decoder::new(codebook, rule).decode(probs)
}
