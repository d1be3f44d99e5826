//! Multi-start simulated annealing over assignments of distinct K-hot words.
//!
//! Each restart anneals from its own starting point (restart 0 starts from
//! [`greedy_codebook`], the others from random codebooks), then polishes its
//! best state with best-improvement hill climbing over the full neighborhood
//! until it is a local optimum. Restarts run in parallel with sub-seeds
//! derived from the master seed; the merge takes the highest objective and
//! breaks ties lexicographically, so the result does not depend on scheduling.

use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;

use super::{
    binomial, candidate_floors, codebook_min_distance, k_hot_words, lex_cmp, masks_to_codebook,
    objective_of, MinDistanceFloor, OptimizerConfig, OptimizerResult,
};
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::seeding::{rng, sub_seed, Rng};

/// Above this many K-hot words the search samples words instead of enumerating them.
const POOL_CAP: u128 = 20_000;
const COOLING: f64 = 0.995;
const REPAIR_ATTEMPTS: u64 = 8;

/// Per-restart record of the best-so-far objective after every proposal.
#[derive(Clone, Debug)]
pub struct RestartTrace {
    pub restart: usize,
    pub best_so_far: Vec<f64>,
}

pub fn local_search(cfg: &OptimizerConfig) -> Result<OptimizerResult> {
    run(cfg, false).map(|(r, _)| r)
}

/// [`local_search`] that also returns the per-restart best-so-far traces.
pub fn local_search_traced(cfg: &OptimizerConfig) -> Result<(OptimizerResult, Vec<RestartTrace>)> {
    run(cfg, true)
}

/// Deterministic constructive baseline: classes in order each take the unused
/// word that adds the most weighted distance to the classes already placed.
pub fn greedy_codebook(cfg: &OptimizerConfig) -> Result<Codebook> {
    cfg.validate()?;
    let problem = Problem::new(cfg);
    let masks = problem.greedy(cfg.seed);
    masks_to_codebook(&masks, cfg, cfg.provenance())
}

fn run(cfg: &OptimizerConfig, trace: bool) -> Result<(OptimizerResult, Vec<RestartTrace>)> {
    cfg.validate()?;
    let start = Instant::now();
    let deadline = cfg.time_budget.map(|b| start + b);
    let mut problem = Problem::new(cfg);

    if cfg.n_classes == 1 {
        let word = k_hot_words(cfg.n_bits, cfg.k_hot)[0];
        let codebook = masks_to_codebook(&[word], cfg, cfg.provenance())?;
        let result = OptimizerResult {
            codebook,
            objective: 0.0,
            min_distance: 0,
            iterations: 0,
            wall_time: start.elapsed(),
            restarts_used: 1,
            budget_truncated: false,
            floor: None,
        };
        return Ok((result, Vec::new()));
    }

    let floor = match cfg.min_distance_floor {
        MinDistanceFloor::None => None,
        MinDistanceFloor::Fixed(d) => Some(d),
        MinDistanceFloor::Auto => Some(problem.auto_floor(cfg.seed)),
    };
    problem.floor = floor.unwrap_or(0);

    let outcomes: Vec<Option<Outcome>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| problem.restart(r, cfg.seed, cfg.max_iters_per_restart, deadline, trace))
        .collect();

    let mut best: Option<Outcome> = None;
    let mut iterations = 0;
    let mut truncated = false;
    let mut restarts_used = 0;
    let mut traces = Vec::new();
    for outcome in outcomes.into_iter().flatten() {
        iterations += outcome.iterations;
        truncated |= outcome.truncated;
        restarts_used += 1;
        let replace = match &best {
            None => true,
            Some(b) => {
                outcome.value > b.value
                    || (outcome.value == b.value
                        && lex_cmp(&outcome.masks, &b.masks, cfg.n_bits).is_lt())
            }
        };
        if let Some(t) = &outcome.trace {
            traces.push(RestartTrace {
                restart: outcome.restart,
                best_so_far: t.clone(),
            });
        }
        if replace {
            best = Some(outcome);
        }
    }
    let best = best.ok_or(Error::FloorUnreachable {
        floor: problem.floor,
    })?;

    let codebook = masks_to_codebook(&best.masks, cfg, cfg.provenance())?;
    let objective = objective_of(cfg, &codebook)?;
    let result = OptimizerResult {
        min_distance: codebook_min_distance(&codebook),
        codebook,
        objective,
        iterations,
        wall_time: start.elapsed(),
        restarts_used,
        budget_truncated: truncated,
        floor,
    };
    Ok((result, traces))
}

struct Outcome {
    restart: usize,
    masks: Vec<u64>,
    value: f64,
    iterations: u64,
    truncated: bool,
    trace: Option<Vec<f64>>,
}

enum Move {
    Replace { class: usize, word: u64 },
    Swap { a: usize, b: usize },
}

struct Problem {
    n: usize,
    n_bits: usize,
    k: usize,
    w: Vec<f64>,
    weighted: bool,
    floor: u32,
    /// Every K-hot word in lexicographic order, when there are few enough.
    pool: Option<Vec<u64>>,
}

impl Problem {
    fn new(cfg: &OptimizerConfig) -> Self {
        let pool = (binomial(cfg.n_bits, cfg.k_hot) <= POOL_CAP)
            .then(|| k_hot_words(cfg.n_bits, cfg.k_hot));
        Problem {
            n: cfg.n_classes,
            n_bits: cfg.n_bits,
            k: cfg.k_hot,
            w: cfg.dense_weights(),
            weighted: !cfg.is_uniform(),
            floor: 0,
            pool,
        }
    }

    #[inline]
    fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    /// Objective with the same pair order and arithmetic as `weighted_objective`.
    fn value(&self, masks: &[u64]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                total += self.weight(i, j) * (masks[i] ^ masks[j]).count_ones() as f64;
            }
        }
        total
    }

    fn shortfall(&self, masks: &[u64]) -> u64 {
        let mut v = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let d = (masks[i] ^ masks[j]).count_ones();
                v += self.floor.saturating_sub(d) as u64;
            }
        }
        v
    }

    fn is_feasible(&self, masks: &[u64]) -> bool {
        masks.iter().all(|m| m.count_ones() as usize == self.k)
            && (0..self.n).all(|i| {
                (i + 1..self.n).all(|j| {
                    let d = (masks[i] ^ masks[j]).count_ones();
                    d > 0 && d >= self.floor
                })
            })
    }

    fn random_word(&self, rng: &mut Rng) -> u64 {
        match &self.pool {
            Some(pool) => pool[rng.random_range(0..pool.len())],
            None => sample(rng, self.n_bits, self.k)
                .into_iter()
                .fold(0u64, |m, i| m | (1 << i)),
        }
    }

    fn random_state(&self, rng: &mut Rng) -> Vec<u64> {
        let mut masks: Vec<u64> = Vec::with_capacity(self.n);
        while masks.len() < self.n {
            let w = self.random_word(rng);
            if !masks.contains(&w) {
                masks.push(w);
            }
        }
        masks
    }

    /// Candidate words for the greedy construction, in lexicographic order.
    fn candidates(&self, seed: u64) -> Vec<u64> {
        if let Some(pool) = &self.pool {
            return pool.clone();
        }
        let mut words: Vec<u64> = (0..self.n_bits)
            .map(|s| {
                (0..self.k)
                    .map(|j| 1u64 << ((s + j) % self.n_bits))
                    .fold(0, |m, b| m | b)
            })
            .collect();
        let mut r = rng(sub_seed(seed, u64::MAX));
        while words.len() < 4 * self.n + 256 {
            words.push(self.random_word(&mut r));
        }
        words.sort_by_key(|&m| super::lex_key(m, self.n_bits));
        words.dedup();
        words
    }

    fn greedy(&self, seed: u64) -> Vec<u64> {
        let candidates = self.candidates(seed);
        let mut chosen: Vec<u64> = Vec::with_capacity(self.n);
        let mut fill = rng(sub_seed(seed, u64::MAX - 1));
        for t in 0..self.n {
            let mut pick: Option<(bool, f64, u64)> = None;
            for &word in &candidates {
                if chosen.contains(&word) {
                    continue;
                }
                let mut gain = 0.0;
                let mut meets_floor = true;
                for (s, &c) in chosen.iter().enumerate() {
                    let d = (c ^ word).count_ones();
                    meets_floor &= d >= self.floor;
                    gain += self.weight(s, t) * d as f64;
                }
                let better = match pick {
                    None => true,
                    Some((f, g, _)) => (meets_floor && !f) || (meets_floor == f && gain > g),
                };
                if better {
                    pick = Some((meets_floor, gain, word));
                }
            }
            let word = match pick {
                Some((_, _, w)) => w,
                None => loop {
                    let w = self.random_word(&mut fill);
                    if !chosen.contains(&w) {
                        break w;
                    }
                },
            };
            chosen.push(word);
        }
        chosen
    }

    /// Largest floor a repair search reaches from a few starting points.
    fn auto_floor(&mut self, seed: u64) -> u32 {
        for d in candidate_floors(self.n, self.n_bits, self.k) {
            if d <= 2 {
                return 2;
            }
            self.floor = d;
            let budget = 50 * (self.n * self.n_bits) as u64 + 20_000;
            let found = (0..REPAIR_ATTEMPTS).any(|a| {
                let mut r = rng(sub_seed(seed, (1 << 40) + a));
                let mut masks = if a == 0 {
                    self.greedy(seed)
                } else {
                    self.random_state(&mut r)
                };
                self.repair(&mut masks, &mut r, budget).0
            });
            if found {
                return d;
            }
        }
        2
    }

    /// Pushes a state towards the floor by minimizing the total distance shortfall.
    /// Returns whether the floor was reached and the number of proposals spent.
    fn repair(&self, masks: &mut [u64], rng: &mut Rng, budget: u64) -> (bool, u64) {
        let mut v = self.shortfall(masks);
        let mut spent = 0;
        while v > 0 && spent < budget {
            spent += 1;
            let class = rng.random_range(0..self.n);
            let word = if rng.random_bool(0.5) {
                self.intra_swap(masks[class], rng)
            } else {
                self.random_word(rng)
            };
            if masks.contains(&word) {
                continue;
            }
            let old = masks[class];
            let mut delta: i64 = 0;
            for (j, &c) in masks.iter().enumerate() {
                if j == class {
                    continue;
                }
                let before = self.floor.saturating_sub((old ^ c).count_ones()) as i64;
                let after = self.floor.saturating_sub((word ^ c).count_ones()) as i64;
                delta += after - before;
            }
            if delta <= 0 || rng.random_bool(0.02) {
                masks[class] = word;
                v = (v as i64 + delta) as u64;
            }
        }
        (v == 0, spent)
    }

    fn intra_swap(&self, word: u64, rng: &mut Rng) -> u64 {
        let ones = word.count_ones() as usize;
        let zeros = self.n_bits - ones;
        let p = nth_set_bit(word, rng.random_range(0..ones));
        let full = if self.n_bits == 64 { u64::MAX } else { (1u64 << self.n_bits) - 1 };
        let q = nth_set_bit(!word & full, rng.random_range(0..zeros));
        word ^ (1 << p) ^ (1 << q)
    }

    fn propose(&self, masks: &[u64], rng: &mut Rng) -> Move {
        let roll: f64 = rng.random();
        let (p_intra, p_replace) = if self.weighted { (0.45, 0.80) } else { (0.55, 1.0) };
        if roll < p_intra {
            let class = rng.random_range(0..self.n);
            Move::Replace {
                class,
                word: self.intra_swap(masks[class], rng),
            }
        } else if roll < p_replace {
            Move::Replace {
                class: rng.random_range(0..self.n),
                word: self.random_word(rng),
            }
        } else {
            let a = rng.random_range(0..self.n);
            let mut b = rng.random_range(0..self.n - 1);
            if b >= a {
                b += 1;
            }
            Move::Swap { a, b }
        }
    }

    /// Objective change of a move, or `None` if it breaks distinctness or the floor.
    fn delta(&self, masks: &[u64], mv: &Move) -> Option<f64> {
        match *mv {
            Move::Replace { class, word } => {
                let old = masks[class];
                if word == old {
                    return None;
                }
                let mut delta = 0.0;
                for (j, &c) in masks.iter().enumerate() {
                    if j == class {
                        continue;
                    }
                    let d_new = (word ^ c).count_ones();
                    if d_new == 0 || d_new < self.floor {
                        return None;
                    }
                    let d_old = (old ^ c).count_ones();
                    delta += self.weight(class, j) * (d_new as f64 - d_old as f64);
                }
                Some(delta)
            }
            Move::Swap { a, b } => {
                let (ca, cb) = (masks[a], masks[b]);
                let mut delta = 0.0;
                for (m, &c) in masks.iter().enumerate() {
                    if m == a || m == b {
                        continue;
                    }
                    let da = (ca ^ c).count_ones() as f64;
                    let db = (cb ^ c).count_ones() as f64;
                    delta += (self.weight(a, m) - self.weight(b, m)) * (db - da);
                }
                Some(delta)
            }
        }
    }

    fn apply(masks: &mut [u64], mv: &Move) {
        match *mv {
            Move::Replace { class, word } => masks[class] = word,
            Move::Swap { a, b } => masks.swap(a, b),
        }
    }

    fn restart(
        &self,
        index: usize,
        seed: u64,
        max_iters: usize,
        deadline: Option<Instant>,
        trace: bool,
    ) -> Option<Outcome> {
        if index > 0 && deadline.is_some_and(|d| Instant::now() >= d) {
            return None;
        }
        let mut rng = rng(sub_seed(seed, index as u64));
        let mut masks = if index == 0 {
            self.greedy(seed)
        } else {
            self.random_state(&mut rng)
        };
        let mut iterations = 0u64;
        if self.floor > 0 && !self.is_feasible(&masks) {
            let budget = 50 * max_iters as u64 + 20_000;
            let (ok, spent) = self.repair(&mut masks, &mut rng, budget);
            iterations += spent;
            if !ok {
                return None;
            }
        }
        debug_assert!(self.is_feasible(&masks));

        let mut current = self.value(&masks);
        let mut best = masks.clone();
        let mut best_value = current;
        let mut temperature = current / (self.n * self.n_bits) as f64;
        let patience = self.n * self.n_bits;
        let mut idle = 0;
        let mut truncated = false;
        let mut history = trace.then(|| Vec::with_capacity(max_iters));

        for it in 0..max_iters {
            if it % 64 == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
                truncated = true;
                break;
            }
            iterations += 1;
            let mv = self.propose(&masks, &mut rng);
            let accepted = match self.delta(&masks, &mv) {
                None => None,
                Some(delta) if delta >= 0.0 => Some(delta),
                Some(delta) if temperature > 0.0 => {
                    let p = (delta / temperature).exp();
                    (rng.random::<f64>() < p).then_some(delta)
                }
                Some(_) => None,
            };
            match accepted {
                Some(delta) => {
                    Self::apply(&mut masks, &mv);
                    current += delta;
                    debug_assert!(self.is_feasible(&masks));
                    // Zero-change moves wander plateaus but do not count as progress.
                    if delta != 0.0 {
                        idle = 0;
                    } else {
                        idle += 1;
                    }
                    if current > best_value + 1e-9 * best_value.abs().max(1.0) {
                        best_value = current;
                        best.copy_from_slice(&masks);
                    }
                }
                None => idle += 1,
            }
            if let Some(h) = history.as_mut() {
                h.push(best_value);
            }
            temperature *= COOLING;
            if idle >= patience {
                break;
            }
        }

        let polish_iters = self.polish(&mut best, deadline, history.as_mut());
        iterations += polish_iters;
        debug_assert!(self.is_feasible(&best));
        Some(Outcome {
            restart: index,
            value: self.value(&best),
            masks: best,
            iterations,
            truncated,
            trace: history,
        })
    }

    /// Best-improvement hill climbing until no single move improves.
    fn polish(
        &self,
        masks: &mut [u64],
        deadline: Option<Instant>,
        mut history: Option<&mut Vec<f64>>,
    ) -> u64 {
        let mut steps = 0;
        let mut value = self.value(masks);
        loop {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return steps;
            }
            let tol = 1e-9 * value.abs().max(1.0);
            let mut best: Option<(f64, Move)> = None;
            let consider = |delta: Option<f64>, mv: Move, best: &mut Option<(f64, Move)>| {
                if let Some(d) = delta {
                    if d > tol && best.as_ref().is_none_or(|(b, _)| d > *b) {
                        *best = Some((d, mv));
                    }
                }
            };
            for class in 0..self.n {
                match &self.pool {
                    Some(pool) => {
                        for &word in pool {
                            let mv = Move::Replace { class, word };
                            consider(self.delta(masks, &mv), mv, &mut best);
                        }
                    }
                    None => {
                        let old = masks[class];
                        for p in 0..self.n_bits {
                            if old >> p & 1 == 0 {
                                continue;
                            }
                            for q in 0..self.n_bits {
                                if old >> q & 1 == 1 {
                                    continue;
                                }
                                let mv = Move::Replace {
                                    class,
                                    word: old ^ (1 << p) ^ (1 << q),
                                };
                                consider(self.delta(masks, &mv), mv, &mut best);
                            }
                        }
                    }
                }
            }
            if self.weighted {
                for a in 0..self.n {
                    for b in a + 1..self.n {
                        let mv = Move::Swap { a, b };
                        consider(self.delta(masks, &mv), mv, &mut best);
                    }
                }
            }
            match best {
                Some((_, mv)) => {
                    Self::apply(masks, &mv);
                    value = self.value(masks);
                    steps += 1;
                    if let Some(h) = history.as_deref_mut() {
                        let prev = h.last().copied().unwrap_or(f64::NEG_INFINITY);
                        h.push(prev.max(value));
                    }
                }
                None => return steps,
            }
        }
    }
}

fn nth_set_bit(mut word: u64, n: usize) -> u32 {
    for _ in 0..n {
        word &= word - 1;
    }
    word.trailing_zeros()
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::optimizer::exact_search;
    use crate::weights::WeightMatrix;

    #[test]
    fn nth_set_bit_walks_ones() {
        assert_eq!(nth_set_bit(0b10110, 0), 1);
        assert_eq!(nth_set_bit(0b10110, 1), 2);
        assert_eq!(nth_set_bit(0b10110, 2), 4);
    }

    #[test]
    fn matches_exact_on_four_by_four() {
        for seed in 0..5 {
            let cfg = OptimizerConfig::new(4, 2).with_seed(seed);
            let r = local_search(&cfg).unwrap();
            assert_eq!(r.objective, 16.0);
        }
    }

    #[test]
    fn result_never_below_greedy() {
        let w = WeightMatrix::from_rows(&[
            vec![0.0, 5.0, 1.0, 0.5, 2.0],
            vec![5.0, 0.0, 3.0, 1.0, 0.1],
            vec![1.0, 3.0, 0.0, 4.0, 1.0],
            vec![0.5, 1.0, 4.0, 0.0, 2.5],
            vec![2.0, 0.1, 1.0, 2.5, 0.0],
        ])
        .unwrap();
        let mut cfg = OptimizerConfig::new(5, 2).with_weights(w.clone()).with_seed(3);
        cfg.restarts = 1;
        cfg.max_iters_per_restart = 1;
        let greedy = greedy_codebook(&cfg).unwrap();
        let g = crate::weighted_objective(&greedy, &w).unwrap();
        let r = local_search(&cfg).unwrap();
        assert!(r.objective >= g);
        let exact = exact_search(&cfg).unwrap();
        assert!(r.objective <= exact.objective);
    }

    #[test]
    fn time_budget_truncates_without_error() {
        let mut cfg = OptimizerConfig::new(40, 8).with_seed(1);
        cfg.time_budget = Some(Duration::from_millis(1));
        cfg.max_iters_per_restart = 1_000_000;
        let r = local_search(&cfg).unwrap();
        assert!(r.budget_truncated);
        assert!(r.codebook.validate().is_valid());
    }

    #[test]
    fn wide_codes_sample_words() {
        let mut cfg = OptimizerConfig::new(40, 20).with_seed(9);
        cfg.restarts = 2;
        cfg.max_iters_per_restart = 2000;
        let r = local_search(&cfg).unwrap();
        assert!(r.codebook.validate().is_valid());
        assert!(r.min_distance >= 2);
    }

    #[test]
    fn fixed_floor_is_met() {
        let cfg = OptimizerConfig::new(10, 4)
            .with_seed(2)
            .with_floor(MinDistanceFloor::Fixed(4));
        let r = local_search(&cfg).unwrap();
        assert!(r.min_distance >= 4);
        assert_eq!(r.floor, Some(4));
    }
}
