//! Comparison codebooks: one-hot, Sylvester-Hadamard and seeded random K-hot.

use rand::seq::SliceRandom;

use crate::codebook::{Codebook, KHot, Provenance};
use crate::codeword::Codeword;
use crate::error::{Error, Result};
use crate::optimizer::binomial;
use crate::seeding::rng;

/// Above this many candidate words, random codebooks are rejection-sampled
/// instead of drawn from the enumerated word list.
const ENUMERATE_CAP: u128 = 1 << 20;

pub fn one_hot(n: usize) -> Result<Codebook> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "one-hot codebooks need at least 2 classes, got {n}"
        )));
    }
    let codes = (0..n)
        .map(|i| Codeword::from_indices(n, &[i]))
        .collect::<Result<Vec<_>>>()?;
    Codebook::new(codes, KHot::Fixed(1), Provenance::OneHot, None)
}

/// Sylvester Hadamard matrix of order `2^m` with entries `+1`/`-1`.
pub fn sylvester(m: u32) -> Vec<Vec<i8>> {
    let mut h = vec![vec![1i8]];
    for _ in 0..m {
        let size = h.len();
        let mut next = vec![vec![0i8; 2 * size]; 2 * size];
        for r in 0..size {
            for c in 0..size {
                let v = h[r][c];
                next[r][c] = v;
                next[r][c + size] = v;
                next[r + size][c] = v;
                next[r + size][c + size] = -v;
            }
        }
        h = next;
    }
    h
}

/// Hadamard codebook of width `2^m - 1`: rows `1..=n_classes` of the Sylvester
/// matrix with `+1 -> 1`, `-1 -> 0` and the constant column 0 removed.
pub fn hadamard(n_classes: usize, m: u32) -> Result<Codebook> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "Hadamard order exponent must be at least 2, got {m}"
        )));
    }
    if m > 16 {
        return Err(Error::InvalidArgument(format!(
            "Hadamard order exponent {m} is unreasonably large"
        )));
    }
    let rows = (1usize << m) - 1;
    if n_classes > rows {
        return Err(Error::Infeasible(format!(
            "H-{rows} has only {rows} usable rows for {n_classes} classes"
        )));
    }
    if n_classes == 0 {
        return Err(Error::InvalidArgument("n_classes must be positive".into()));
    }
    let h = sylvester(m);
    let codes = h[1..=n_classes]
        .iter()
        .map(|row| {
            let bits: Vec<bool> = row[1..].iter().map(|&v| v > 0).collect();
            Codeword::from_bits(&bits)
        })
        .collect();
    Codebook::new(codes, KHot::Mixed, Provenance::Hadamard, None)
}

/// `n` distinct uniformly sampled K-hot words of width `b`, deterministic in `seed`.
pub fn random_k_hot(n: usize, b: usize, k: usize, seed: u64) -> Result<Codebook> {
    if n == 0 || b == 0 || k == 0 || k > b {
        return Err(Error::InvalidArgument(format!(
            "random K-hot codebook needs n >= 1 and 1 <= k <= b (n={n}, b={b}, k={k})"
        )));
    }
    let available = binomial(b, k);
    if n as u128 > available {
        return Err(Error::Infeasible(format!(
            "{n} classes need distinct {k}-hot words but only C({b},{k}) = {available} exist"
        )));
    }
    let mut r = rng(seed);
    let codes = if available <= ENUMERATE_CAP && (n as u128) * 4 > available {
        // Dense case: shuffle the full word list and take a prefix.
        let mut all = Vec::with_capacity(available as usize);
        let mut current: Vec<usize> = (0..k).collect();
        loop {
            all.push(Codeword::from_indices(b, &current)?);
            if !next_combination(&mut current, b) {
                break;
            }
        }
        all.shuffle(&mut r);
        all.truncate(n);
        all
    } else {
        let mut codes: Vec<Codeword> = Vec::with_capacity(n);
        let mut seen = std::collections::HashSet::with_capacity(n);
        while codes.len() < n {
            let ones = rand::seq::index::sample(&mut r, b, k).into_vec();
            let cw = Codeword::from_indices(b, &ones)?;
            if seen.insert(cw.clone()) {
                codes.push(cw);
            }
        }
        codes
    };
    Codebook::new(codes, KHot::Fixed(k), Provenance::Random, Some(seed))
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
