//! Fixed-length binary codewords.
//!
//! Bits are packed little-endian into `u64` words: bit `i` of the codeword
//! lives in word `i / 64` at position `i % 64`. The textual form is a string
//! of `'0'`/`'1'` characters where character `i` is bit `i`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    len: usize,
    words: Vec<u64>,
}

impl Codeword {
    /// All-zero codeword of the given length.
    pub fn zeros(len: usize) -> Self {
        Codeword {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut cw = Codeword::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                cw.set(i, true);
            }
        }
        cw
    }

    /// Codeword with exactly the listed positions set.
    pub fn from_indices(len: usize, ones: &[usize]) -> Result<Self> {
        let mut cw = Codeword::zeros(len);
        for &i in ones {
            if i >= len {
                return Err(Error::InvalidArgument(format!(
                    "bit index {i} out of range for length {len}"
                )));
            }
            cw.set(i, true);
        }
        Ok(cw)
    }

    /// Codeword from the low `len` bits of `mask` (bit `i` of the mask is bit `i`).
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64, "mask codewords are limited to 64 bits");
        let mask = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
        Codeword {
            len,
            words: if len == 0 { Vec::new() } else { vec![mask] },
        }
    }

    /// Parses a `'0'`/`'1'` string.
    pub fn parse(s: &str) -> Result<Self> {
        let mut cw = Codeword::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => cw.set(i, true),
                other => {
                    return Err(Error::parse(
                        format!("character {i}"),
                        format!("expected '0' or '1', found {other:?}"),
                    ))
                }
            }
        }
        Ok(cw)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    fn set(&mut self, i: usize, value: bool) {
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Bits as `0.0`/`1.0` targets.
    pub fn to_targets(&self) -> Vec<f64> {
        self.bits().map(|b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// The packed representation for codewords of at most 64 bits.
    pub fn as_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    /// Number of positions where `self` and `other` differ.
    ///
    /// Panics on a length mismatch; see [`crate::hamming_distance`] for the
    /// checked version.
    pub(crate) fn distance_unchecked(&self, other: &Codeword) -> u32 {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }
}

impl Ord for Codeword {
    /// Lexicographic order on the bit string (`'0' < '1'`, shorter prefix first).
    fn cmp(&self, other: &Self) -> Ordering {
        if self.len == other.len {
            for (a, b) in self.words.iter().zip(&other.words) {
                match a.reverse_bits().cmp(&b.reverse_bits()) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            return Ordering::Equal;
        }
        self.bits()
            .zip(other.bits())
            .map(|(a, b)| a.cmp(&b))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| self.len.cmp(&other.len))
    }
}

impl PartialOrd for Codeword {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Codeword({self})")
    }
}

impl std::str::FromStr for Codeword {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Codeword::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let cw = Codeword::parse("10110").unwrap();
        assert_eq!(cw.len(), 5);
        assert_eq!(cw.popcount(), 3);
        assert!(cw.get(0) && !cw.get(1) && cw.get(3) && !cw.get(4));
        assert_eq!(cw.to_string(), "10110");
        assert!(Codeword::parse("10a1").is_err());
    }

    #[test]
    fn long_codewords_span_words() {
        let ones: Vec<usize> = (0..200).step_by(3).collect();
        let cw = Codeword::from_indices(200, &ones).unwrap();
        assert_eq!(cw.popcount(), ones.len());
        assert_eq!(Codeword::parse(&cw.to_string()).unwrap(), cw);
        assert!(cw.as_mask().is_none());
    }

    #[test]
    fn order_is_lexicographic_on_bit_string() {
        let mut words: Vec<Codeword> = ["0110", "1001", "0011", "1100", "0101"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        words.sort();
        let sorted: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        assert_eq!(sorted, ["0011", "0101", "0110", "1001", "1100"]);

        let a = Codeword::from_indices(70, &[65]).unwrap();
        let b = Codeword::from_indices(70, &[3]).unwrap();
        assert!(a < b);
    }

    #[test]
    fn mask_round_trip() {
        let cw = Codeword::from_mask(0b1011, 6);
        assert_eq!(cw.to_string(), "110100");
        assert_eq!(cw.as_mask(), Some(0b1011));
    }
}
