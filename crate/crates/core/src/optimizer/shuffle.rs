use rand::seq::SliceRandom;

use crate::codebook::{Codebook, Provenance};
use crate::error::{check_dim, Result};
use crate::objective::weighted_objective;
use crate::seeding::{rng, sub_seed};
use crate::weights::WeightMatrix;

/// Largest class count searched over every permutation.
const EXHAUSTIVE_MAX: usize = 8;
const SWAP_RESTARTS: u64 = 16;

/// Keeps the set of codewords and optimizes which class gets which word.
///
/// Up to 8 classes every permutation is tried (codewords sorted first, so the
/// lexicographically smallest optimal codebook wins ties); above that,
/// best-improvement pairwise swaps from the input assignment plus seeded
/// random restarts. The result never scores below the input.
pub fn weighted_shuffle(cb: &Codebook, w: &WeightMatrix) -> Result<Codebook> {
    check_dim("weight matrix size", cb.n_classes(), w.n())?;
    let n = cb.n_classes();
    let dist: Vec<f64> = (0..n * n)
        .map(|k| cb.code(k / n).distance_unchecked(cb.code(k % n)) as f64)
        .collect();
    let score = |perm: &[usize]| -> f64 {
        let mut total = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                total += w.get(i, j) * dist[perm[i] * n + perm[j]];
            }
        }
        total
    };

    let identity: Vec<usize> = (0..n).collect();
    let best = if n <= EXHAUSTIVE_MAX {
        let mut perm = identity.clone();
        perm.sort_by(|&a, &b| cb.code(a).cmp(cb.code(b)));
        let mut best = perm.clone();
        let mut best_value = score(&perm);
        while next_permutation(&mut perm, |a, b| cb.code(a).cmp(cb.code(b))) {
            let v = score(&perm);
            if v > best_value + 1e-12 * best_value.abs().max(1.0) {
                best_value = v;
                best.copy_from_slice(&perm);
            }
        }
        best
    } else {
        let mut best = identity.clone();
        let mut best_value = score(&identity);
        let mut r = rng(sub_seed(cb.seed().unwrap_or(0), 0x5348_5546));
        for restart in 0..SWAP_RESTARTS {
            let mut perm = identity.clone();
            if restart > 0 {
                perm.shuffle(&mut r);
            }
            let v = climb(&mut perm, &score);
            if v > best_value {
                best_value = v;
                best = perm;
            }
        }
        best
    };

    let shuffled = cb.permuted(&best, Provenance::OptimizedWeighted)?;
    let original = cb.permuted(&identity, Provenance::OptimizedWeighted)?;
    if weighted_objective(&shuffled, w)? >= weighted_objective(&original, w)? {
        Ok(shuffled)
    } else {
        Ok(original)
    }
}

fn climb(perm: &mut [usize], score: &impl Fn(&[usize]) -> f64) -> f64 {
    let n = perm.len();
    let mut value = score(perm);
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..n {
            for b in a + 1..n {
                perm.swap(a, b);
                let v = score(perm);
                perm.swap(a, b);
                let tol = 1e-12 * value.abs().max(1.0);
                if v > value + tol && best.is_none_or(|(_, _, bv)| v > bv) {
                    best = Some((a, b, v));
                }
            }
        }
        match best {
            Some((a, b, v)) => {
                perm.swap(a, b);
                value = v;
            }
            None => return value,
        }
    }
}

/// Advances to the next permutation in lexicographic order under `cmp`.
fn next_permutation<T: Copy>(
    xs: &mut [T],
    cmp: impl Fn(T, T) -> std::cmp::Ordering,
) -> bool {
    let n = xs.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && cmp(xs[i - 1], xs[i]).is_ge() {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while cmp(xs[j], xs[i - 1]).is_le() {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::KHot;
    use crate::codeword::Codeword;

    #[test]
    fn next_permutation_enumerates_all() {
        let mut p = [0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p, |a: i32, b| a.cmp(&b)) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(p, [3, 2, 1, 0]);
    }

    #[test]
    fn moves_the_complement_pair_onto_the_heavy_edge() {
        // identity puts the distance-4 pair on classes 0 and 2
        let codes = ["1100", "1010", "0011"]
            .iter()
            .map(|s| s.parse::<Codeword>().unwrap())
            .collect();
        let cb = Codebook::new(codes, KHot::Fixed(2), Provenance::Random, None).unwrap();
        let w = WeightMatrix::from_rows(&[
            vec![0.0, 10.0, 1.0],
            vec![10.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(weighted_objective(&cb, &w).unwrap(), 20.0 + 4.0 + 2.0);
        let out = weighted_shuffle(&cb, &w).unwrap();
        assert_eq!(weighted_objective(&out, &w).unwrap(), 40.0 + 2.0 + 2.0);
        assert_eq!(
            crate::hamming_distance(out.code(0), out.code(1)).unwrap(),
            4
        );
    }
}
