use std::time::Instant;

use super::{
    binomial, candidate_floors, codebook_min_distance, falling_factorial, k_hot_words,
    masks_to_codebook, objective_of, MinDistanceFloor, OptimizerConfig, OptimizerResult,
};
use crate::error::{Error, Result};

/// Global maximum of the weighted objective by depth-first enumeration of every
/// assignment of distinct K-hot words to classes.
///
/// Candidates are visited in lexicographic order, so the first optimum found
/// is the lexicographically smallest one; later branches only replace it on a
/// strict improvement.
pub fn exact_search(cfg: &OptimizerConfig) -> Result<OptimizerResult> {
    cfg.validate()?;
    let start = Instant::now();
    let words = k_hot_words(cfg.n_bits, cfg.k_hot);
    let size = falling_factorial(binomial(cfg.n_bits, cfg.k_hot), cfg.n_classes);
    if size > cfg.exact_cap {
        return Err(Error::InstanceTooLarge {
            size,
            cap: cfg.exact_cap,
        });
    }

    let floor = match cfg.min_distance_floor {
        MinDistanceFloor::None => None,
        MinDistanceFloor::Fixed(d) => Some(d),
        MinDistanceFloor::Auto => Some(max_min_distance_exact(cfg)?),
    };

    let mut search = Dfs::new(cfg, &words, floor.unwrap_or(0));
    search.run();
    let best = search.best.ok_or(Error::FloorUnreachable {
        floor: floor.unwrap_or(0),
    })?;

    let codebook = masks_to_codebook(&best, cfg, cfg.provenance())?;
    let objective = objective_of(cfg, &codebook)?;
    Ok(OptimizerResult {
        min_distance: codebook_min_distance(&codebook),
        codebook,
        objective,
        iterations: search.leaves,
        wall_time: start.elapsed(),
        restarts_used: 1,
        budget_truncated: false,
        floor,
    })
}

/// Largest minimum pairwise distance any codebook of this shape can reach.
pub fn max_min_distance_exact(cfg: &OptimizerConfig) -> Result<u32> {
    cfg.validate()?;
    if cfg.n_classes < 2 {
        return Ok(0);
    }
    let words = k_hot_words(cfg.n_bits, cfg.k_hot);
    for d in candidate_floors(cfg.n_classes, cfg.n_bits, cfg.k_hot) {
        // Bit permutations act transitively on K-hot words, so the first
        // codeword can be fixed without losing any packing.
        let mut chosen = vec![words[0]];
        if pack(&words, d, cfg.n_classes, &mut chosen, 1) {
            return Ok(d);
        }
    }
    Ok(2)
}

fn pack(words: &[u64], d: u32, target: usize, chosen: &mut Vec<u64>, from: usize) -> bool {
    if chosen.len() == target {
        return true;
    }
    for idx in from..words.len() {
        if words.len() - idx < target - chosen.len() {
            return false;
        }
        let w = words[idx];
        if chosen.iter().all(|&c| (c ^ w).count_ones() >= d) {
            chosen.push(w);
            if pack(words, d, target, chosen, idx + 1) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

struct Dfs<'a> {
    n: usize,
    words: &'a [u64],
    w: Vec<f64>,
    floor: u32,
    /// `suffix_bound[t]`: optimistic value of all pairs involving a class >= t.
    suffix_bound: Vec<f64>,
    used: Vec<bool>,
    chosen: Vec<u64>,
    best: Option<Vec<u64>>,
    best_value: f64,
    leaves: u64,
}

impl<'a> Dfs<'a> {
    fn new(cfg: &OptimizerConfig, words: &'a [u64], floor: u32) -> Self {
        let n = cfg.n_classes;
        let w = cfg.dense_weights();
        let max_d = (2 * cfg.k_hot.min(cfg.n_bits - cfg.k_hot)) as f64;
        let mut suffix_bound = vec![0.0; n + 1];
        for t in (0..n).rev() {
            let row: f64 = (0..t).map(|s| w[s * n + t]).sum();
            suffix_bound[t] = suffix_bound[t + 1] + row * max_d;
        }
        Dfs {
            n,
            words,
            w,
            floor,
            suffix_bound,
            used: vec![false; words.len()],
            chosen: Vec::with_capacity(n),
            best: None,
            best_value: f64::NEG_INFINITY,
            leaves: 0,
        }
    }

    fn tolerance(&self) -> f64 {
        1e-9 * self.best_value.abs().max(1.0)
    }

    fn run(&mut self) {
        self.descend(0.0);
    }

    fn descend(&mut self, partial: f64) {
        let t = self.chosen.len();
        if t == self.n {
            self.leaves += 1;
            if self.best.is_none() || partial > self.best_value + self.tolerance() {
                self.best_value = partial;
                self.best = Some(self.chosen.clone());
            }
            return;
        }
        if self.best.is_some()
            && partial + self.suffix_bound[t] <= self.best_value + self.tolerance()
        {
            return;
        }
        for idx in 0..self.words.len() {
            if self.used[idx] {
                continue;
            }
            let word = self.words[idx];
            let mut gain = 0.0;
            let mut ok = true;
            for (s, &c) in self.chosen.iter().enumerate() {
                let d = (c ^ word).count_ones();
                if d < self.floor {
                    ok = false;
                    break;
                }
                gain += self.w[s * self.n + t] * d as f64;
            }
            if !ok {
                continue;
            }
            self.used[idx] = true;
            self.chosen.push(word);
            self.descend(partial + gain);
            self.chosen.pop();
            self.used[idx] = false;
        }
    }
}
