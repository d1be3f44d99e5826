//! Hamming distances and the similarity-weighted codebook objective.

use crate::codebook::Codebook;
use crate::codeword::Codeword;
use crate::error::{check_dim, Error, Result};
use crate::weights::WeightMatrix;

/// Number of positions where `a` and `b` differ.
pub fn hamming_distance(a: &Codeword, b: &Codeword) -> Result<u32> {
    check_dim("codeword length", a.len(), b.len())?;
    Ok(a.distance_unchecked(b))
}

/// `sum_{i<j} w[i][j] * d(c_i, c_j)`.
///
/// Pairs are accumulated with `i` outer and `j` inner; every caller that needs
/// a reportable objective goes through this function so values compare exactly.
pub fn weighted_objective(cb: &Codebook, w: &WeightMatrix) -> Result<f64> {
    check_dim("weight matrix size", cb.n_classes(), w.n())?;
    let codes = cb.codes();
    let mut total = 0.0;
    for i in 0..codes.len() {
        for j in i + 1..codes.len() {
            total += w.get(i, j) * codes[i].distance_unchecked(&codes[j]) as f64;
        }
    }
    Ok(total)
}

/// Unweighted sum of all pairwise distances.
pub fn pairwise_distance_sum(cb: &Codebook) -> u64 {
    let codes = cb.codes();
    let mut total = 0u64;
    for i in 0..codes.len() {
        for j in i + 1..codes.len() {
            total += codes[i].distance_unchecked(&codes[j]) as u64;
        }
    }
    total
}

pub fn min_pairwise_distance(cb: &Codebook) -> Result<u32> {
    if cb.n_classes() < 2 {
        return Err(Error::InvalidArgument(
            "minimum pairwise distance needs at least 2 codewords".into(),
        ));
    }
    let codes = cb.codes();
    let mut best = u32::MAX;
    for i in 0..codes.len() {
        for j in i + 1..codes.len() {
            best = best.min(codes[i].distance_unchecked(&codes[j]));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{KHot, Provenance};

    fn cw(s: &str) -> Codeword {
        s.parse().unwrap()
    }

    fn book(ws: &[&str], k: usize) -> Codebook {
        Codebook::new(
            ws.iter().map(|s| cw(s)).collect(),
            KHot::Fixed(k),
            Provenance::Random,
            None,
        )
        .unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&cw("10110"), &cw("10110")).unwrap(), 0);
        assert_eq!(hamming_distance(&cw("10110"), &cw("01110")).unwrap(), 2);
        assert_eq!(hamming_distance(&cw("1100"), &cw("0011")).unwrap(), 4);
        assert!(matches!(
            hamming_distance(&cw("110"), &cw("1100")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn objective_examples() {
        let one_hot = book(&["100", "010", "001"], 1);
        let uniform = WeightMatrix::uniform(3).unwrap();
        assert_eq!(weighted_objective(&one_hot, &uniform).unwrap(), 6.0);

        let pair = book(&["1100", "0011"], 2);
        let w = WeightMatrix::from_rows(&[vec![0.0, 2.5], vec![2.5, 0.0]]).unwrap();
        assert_eq!(weighted_objective(&pair, &w).unwrap(), 10.0);

        // two complement pairs: 2*4 + 4*2
        let best = book(&["1100", "0011", "1010", "0101"], 2);
        let uniform4 = WeightMatrix::uniform(4).unwrap();
        assert_eq!(weighted_objective(&best, &uniform4).unwrap(), 16.0);

        assert!(weighted_objective(&best, &uniform).is_err());
    }

    #[test]
    fn min_distance_examples() {
        let one_hot = book(&["1000", "0100", "0010", "0001"], 1);
        assert_eq!(min_pairwise_distance(&one_hot).unwrap(), 2);
        assert!(min_pairwise_distance(&book(&["10"], 1)).is_err());
    }
}
