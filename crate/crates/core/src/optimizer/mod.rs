//! Codebook optimization: exhaustive oracle, multi-start annealing, weighted
//! assignment shuffle and LP-format export.
//!
//! All searches work on packed `u64` masks, so optimized codebooks are limited
//! to 64 bits. Ties between equally good codebooks are broken towards the
//! lexicographically smallest concatenated bit string.

mod exact;
mod local;
mod lp;
mod shuffle;

use std::time::Duration;

use serde::Serialize;

pub use exact::{exact_search, max_min_distance_exact};
pub use local::{greedy_codebook, local_search, local_search_traced, RestartTrace};
pub use lp::{export_lp, lp_model, LpStats};
pub use shuffle::weighted_shuffle;

use crate::codebook::{Codebook, KHot, Provenance};
use crate::codeword::Codeword;
use crate::error::{Error, Result};
use crate::weights::WeightMatrix;

/// Default cap on the ordered-selection count `P(C(B,K), N)` for [`exact_search`].
pub const DEFAULT_EXACT_CAP: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Weights {
    Uniform,
    Matrix(WeightMatrix),
}

/// Optional hard lower bound on the minimum pairwise distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MinDistanceFloor {
    #[default]
    None,
    Fixed(u32),
    /// Use the largest minimum distance the search can reach for this shape.
    Auto,
}

#[derive(Clone, Debug)]
pub struct OptimizerConfig {
    pub n_classes: usize,
    pub n_bits: usize,
    pub k_hot: usize,
    pub weights: Weights,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters_per_restart: usize,
    pub time_budget: Option<Duration>,
    pub min_distance_floor: MinDistanceFloor,
    pub exact_cap: u128,
}

impl OptimizerConfig {
    /// `n_classes` classes, `n_bits = n_classes`, uniform weights, seed 0.
    pub fn new(n_classes: usize, k_hot: usize) -> Self {
        OptimizerConfig {
            n_classes,
            n_bits: n_classes,
            k_hot,
            weights: Weights::Uniform,
            seed: 0,
            restarts: 32,
            max_iters_per_restart: 10_000,
            time_budget: None,
            min_distance_floor: MinDistanceFloor::None,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }

    pub fn with_bits(mut self, n_bits: usize) -> Self {
        self.n_bits = n_bits;
        self
    }

    pub fn with_weights(mut self, weights: WeightMatrix) -> Self {
        self.weights = Weights::Matrix(weights);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_floor(mut self, floor: MinDistanceFloor) -> Self {
        self.min_distance_floor = floor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (n, b, k) = (self.n_classes, self.n_bits, self.k_hot);
        if n == 0 {
            return Err(Error::InvalidArgument("n_classes must be positive".into()));
        }
        if b == 0 || b > 64 {
            return Err(Error::InvalidArgument(format!(
                "n_bits must be in 1..=64, got {b}"
            )));
        }
        if k == 0 || k >= b {
            return Err(Error::Infeasible(format!("k_hot must satisfy 1 <= K < B, got K={k}, B={b}")));
        }
        let words = binomial(b, k);
        if (n as u128) > words {
            return Err(Error::Infeasible(format!(
                "{n} classes need distinct {k}-hot words but only C({b},{k}) = {words} exist"
            )));
        }
        if self.restarts == 0 || self.max_iters_per_restart == 0 {
            return Err(Error::InvalidArgument(
                "restarts and max_iters_per_restart must be positive".into(),
            ));
        }
        if let Weights::Matrix(w) = &self.weights {
            crate::error::check_dim("weight matrix size", n, w.n())?;
        }
        Ok(())
    }

    pub(crate) fn provenance(&self) -> Provenance {
        match self.weights {
            Weights::Uniform => Provenance::OptimizedUnweighted,
            Weights::Matrix(_) => Provenance::OptimizedWeighted,
        }
    }

    /// Dense row-major weights; uniform means 1 off the diagonal.
    pub(crate) fn dense_weights(&self) -> Vec<f64> {
        let n = self.n_classes;
        match &self.weights {
            Weights::Uniform => (0..n * n)
                .map(|k| if k / n == k % n { 0.0 } else { 1.0 })
                .collect(),
            Weights::Matrix(w) => (0..n * n).map(|k| w.get(k / n, k % n)).collect(),
        }
    }

    pub(crate) fn is_uniform(&self) -> bool {
        match &self.weights {
            Weights::Uniform => true,
            Weights::Matrix(w) => w.is_uniform(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizerResult {
    pub codebook: Codebook,
    pub objective: f64,
    /// Minimum pairwise distance; 0 for a single-class codebook.
    pub min_distance: u32,
    pub iterations: u64,
    pub wall_time: Duration,
    pub restarts_used: usize,
    /// Set when the time budget stopped the search early.
    pub budget_truncated: bool,
    /// Floor that was enforced, if any.
    pub floor: Option<u32>,
}

#[derive(Serialize)]
struct ResultDoc {
    objective: f64,
    min_distance: u32,
    iterations: u64,
    wall_time_s: f64,
    restarts_used: usize,
    budget_truncated: bool,
    min_distance_floor: Option<u32>,
}

impl OptimizerResult {
    pub fn to_json(&self) -> String {
        let doc = ResultDoc {
            objective: self.objective,
            min_distance: self.min_distance,
            iterations: self.iterations,
            wall_time_s: self.wall_time.as_secs_f64(),
            restarts_used: self.restarts_used,
            budget_truncated: self.budget_truncated,
            min_distance_floor: self.floor,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("result serializes");
        s.push('\n');
        s
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `m * (m-1) * ... * (m-n+1)`, saturating.
pub(crate) fn falling_factorial(m: u128, n: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..n as u128 {
        if i >= m {
            return 0;
        }
        acc = acc.saturating_mul(m - i);
    }
    acc
}

/// Sort key whose integer order matches the lexicographic order of the bit string.
#[inline]
pub(crate) fn lex_key(mask: u64, n_bits: usize) -> u64 {
    mask.reverse_bits() >> (64 - n_bits)
}

/// Lexicographic comparison of two assignments by concatenated bit string.
pub(crate) fn lex_cmp(a: &[u64], b: &[u64], n_bits: usize) -> std::cmp::Ordering {
    a.iter()
        .map(|&m| lex_key(m, n_bits))
        .cmp(b.iter().map(|&m| lex_key(m, n_bits)))
}

/// Every K-hot mask of width B in lexicographic order of its bit string.
pub(crate) fn k_hot_words(n_bits: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(binomial(n_bits, k) as usize);
    if k == 0 {
        out.push(0);
        return out;
    }
    let limit: u128 = 1u128 << n_bits;
    let mut v: u64 = (1u64 << k) - 1;
    loop {
        out.push(v);
        // Gosper's hack: next integer with the same popcount.
        let c = v & v.wrapping_neg();
        let r = v as u128 + c as u128;
        if r >= limit {
            break;
        }
        let r = r as u64;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out.sort_by_key(|&m| lex_key(m, n_bits));
    out
}

/// Upper bound on the number of weight-`w` words of length `n` at pairwise
/// distance >= `d` (Johnson bound for constant-weight codes).
pub(crate) fn johnson_bound(n: usize, d: u32, w: usize) -> u128 {
    let delta = (d as usize).div_ceil(2);
    if delta <= 1 {
        return binomial(n, w);
    }
    if w > n {
        return 0;
    }
    let w = w.min(n - w);
    if w < delta {
        return 1;
    }
    (n as u128 * johnson_bound(n - 1, d, w - 1)) / w as u128
}

/// Candidate even floors, largest first, that the Johnson bound does not rule out.
pub(crate) fn candidate_floors(n_classes: usize, n_bits: usize, k: usize) -> Vec<u32> {
    let max_d = 2 * k.min(n_bits - k) as u32;
    (1..=max_d / 2)
        .rev()
        .map(|h| 2 * h)
        .filter(|&d| d <= 2 || johnson_bound(n_bits, d, k) >= n_classes as u128)
        .collect()
}

pub(crate) fn masks_to_codebook(
    masks: &[u64],
    cfg: &OptimizerConfig,
    provenance: Provenance,
) -> Result<Codebook> {
    let codes = masks
        .iter()
        .map(|&m| Codeword::from_mask(m, cfg.n_bits))
        .collect();
    Codebook::new(codes, KHot::Fixed(cfg.k_hot), provenance, Some(cfg.seed))
}

/// Reportable objective of an optimizer output under the configured weights.
pub(crate) fn objective_of(cfg: &OptimizerConfig, cb: &Codebook) -> Result<f64> {
    match &cfg.weights {
        Weights::Matrix(w) => crate::objective::weighted_objective(cb, w),
        Weights::Uniform if cb.n_classes() < 2 => Ok(0.0),
        Weights::Uniform => {
            crate::objective::weighted_objective(cb, &WeightMatrix::uniform(cb.n_classes())?)
        }
    }
}

pub(crate) fn codebook_min_distance(cb: &Codebook) -> u32 {
    crate::objective::min_pairwise_distance(cb).unwrap_or(0)
}
