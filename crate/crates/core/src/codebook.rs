//! Class-indexed codebooks, their invariants, and the JSON document format.

use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::codeword::Codeword;
use crate::error::{Error, Result};

/// Number of hot bits per codeword, or `Mixed` for codes without a fixed weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KHot {
    Fixed(usize),
    Mixed,
}

impl Serialize for KHot {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KHot::Fixed(k) => s.serialize_u64(*k as u64),
            KHot::Mixed => s.serialize_str("mixed"),
        }
    }
}

impl<'de> Deserialize<'de> for KHot {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Ok(KHot::Fixed(k as usize)),
            Raw::Str(s) if s == "mixed" => Ok(KHot::Mixed),
            Raw::Str(s) => Err(de::Error::custom(format!(
                "k_hot must be an integer or \"mixed\", found {s:?}"
            ))),
        }
    }
}

impl fmt::Display for KHot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KHot::Fixed(k) => write!(f, "{k}"),
            KHot::Mixed => f.write_str("mixed"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    OneHot,
    Hadamard,
    Random,
    OptimizedUnweighted,
    OptimizedWeighted,
}

impl Provenance {
    pub fn is_optimized(self) -> bool {
        matches!(
            self,
            Provenance::OptimizedUnweighted | Provenance::OptimizedWeighted
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::OneHot => "one_hot",
            Provenance::Hadamard => "hadamard",
            Provenance::Random => "random",
            Provenance::OptimizedUnweighted => "optimized_unweighted",
            Provenance::OptimizedWeighted => "optimized_weighted",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One broken codebook invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoCodes,
    ZeroWidth,
    Length { class: usize, expected: usize, found: usize },
    KHotRange { k: usize, n_bits: usize },
    Popcount { class: usize, expected: usize, found: usize },
    Duplicate { first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoCodes => f.write_str("codebook has no codewords"),
            Violation::ZeroWidth => f.write_str("n_bits must be positive"),
            Violation::Length {
                class,
                expected,
                found,
            } => write!(f, "codes[{class}] has length {found}, expected {expected}"),
            Violation::KHotRange { k, n_bits } => {
                write!(f, "k_hot {k} is outside 1..={n_bits}")
            }
            Violation::Popcount {
                class,
                expected,
                found,
            } => write!(f, "codes[{class}] has {found} hot bits, expected {expected}"),
            Violation::Duplicate { first, second } => {
                write!(f, "codes[{first}] and codes[{second}] are identical")
            }
        }
    }
}

/// Every violated invariant of a codebook; empty iff the codebook is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks the codebook invariants on raw parts.
///
/// Width is not tied to provenance: optimized codebooks default to one bit per
/// class but may be generated at any width.
pub fn validate_codebook(
    codes: &[Codeword],
    n_bits: usize,
    k_hot: KHot,
) -> ValidationReport {
    let mut violations = Vec::new();
    if codes.is_empty() {
        violations.push(Violation::NoCodes);
    }
    if n_bits == 0 {
        violations.push(Violation::ZeroWidth);
    }
    if let KHot::Fixed(k) = k_hot {
        if k == 0 || k > n_bits {
            violations.push(Violation::KHotRange { k, n_bits });
        }
    }
    for (class, code) in codes.iter().enumerate() {
        if code.len() != n_bits {
            violations.push(Violation::Length {
                class,
                expected: n_bits,
                found: code.len(),
            });
        }
        if let KHot::Fixed(k) = k_hot {
            let found = code.popcount();
            if found != k {
                violations.push(Violation::Popcount {
                    class,
                    expected: k,
                    found,
                });
            }
        }
    }
    for i in 0..codes.len() {
        for j in i + 1..codes.len() {
            if codes[i] == codes[j] {
                violations.push(Violation::Duplicate {
                    first: i,
                    second: j,
                });
            }
        }
    }
    ValidationReport { violations }
}

/// An ordered, validated set of class codewords. Class ids are `0..n_classes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codebook {
    n_bits: usize,
    k_hot: KHot,
    provenance: Provenance,
    seed: Option<u64>,
    codes: Vec<Codeword>,
}

impl Codebook {
    pub fn new(
        codes: Vec<Codeword>,
        k_hot: KHot,
        provenance: Provenance,
        seed: Option<u64>,
    ) -> Result<Self> {
        let n_bits = codes.first().map_or(0, Codeword::len);
        let report = validate_codebook(&codes, n_bits, k_hot);
        if !report.is_valid() {
            return Err(Error::InvalidCodebook(report));
        }
        Ok(Codebook {
            n_bits,
            k_hot,
            provenance,
            seed,
            codes,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.codes.len()
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn k_hot(&self) -> KHot {
        self.k_hot
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn codes(&self) -> &[Codeword] {
        &self.codes
    }

    pub fn code(&self, class: usize) -> &Codeword {
        &self.codes[class]
    }

    /// Re-validates the invariants; always empty for a constructed codebook.
    pub fn validate(&self) -> ValidationReport {
        validate_codebook(&self.codes, self.n_bits, self.k_hot)
    }

    /// Same codewords reassigned so that class `i` receives `self.code(perm[i])`.
    pub fn permuted(&self, perm: &[usize], provenance: Provenance) -> Result<Codebook> {
        crate::error::check_dim("permutation length", self.n_classes(), perm.len())?;
        let codes = perm.iter().map(|&p| self.codes[p].clone()).collect();
        Codebook::new(codes, self.k_hot, provenance, self.seed)
    }

    /// The concatenated bit string, used as the deterministic tie-break key.
    pub fn concatenated(&self) -> String {
        self.codes.iter().map(|c| c.to_string()).collect()
    }

    pub fn to_json(&self) -> String {
        let doc = CodebookDoc {
            n_classes: self.n_classes(),
            n_bits: self.n_bits,
            k_hot: self.k_hot,
            provenance: self.provenance,
            seed: self.seed,
            codes: self.codes.iter().map(|c| c.to_string()).collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("codebook serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CodebookDoc = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        doc.into_codebook()
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::file(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Codebook::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodebookDoc {
    n_classes: usize,
    n_bits: usize,
    k_hot: KHot,
    provenance: Provenance,
    seed: Option<u64>,
    codes: Vec<String>,
}

impl CodebookDoc {
    fn into_codebook(self) -> Result<Codebook> {
        if self.codes.len() != self.n_classes {
            return Err(Error::parse(
                "codes",
                format!(
                    "n_classes is {} but {} codes are present",
                    self.n_classes,
                    self.codes.len()
                ),
            ));
        }
        let mut codes = Vec::with_capacity(self.codes.len());
        for (i, s) in self.codes.iter().enumerate() {
            let cw = Codeword::parse(s).map_err(|e| match e {
                Error::Parse { location, message } => {
                    Error::parse(format!("codes[{i}] {location}"), message)
                }
                other => other,
            })?;
            if cw.len() != self.n_bits {
                return Err(Error::parse(
                    format!("codes[{i}]"),
                    format!("length {} does not match n_bits {}", cw.len(), self.n_bits),
                ));
            }
            codes.push(cw);
        }
        let report = validate_codebook(&codes, self.n_bits, self.k_hot);
        if let Some(v) = report.violations.first() {
            let location = match v {
                Violation::Length { class, .. } | Violation::Popcount { class, .. } => {
                    format!("codes[{class}]")
                }
                Violation::Duplicate { second, .. } => format!("codes[{second}]"),
                Violation::KHotRange { .. } => "k_hot".to_string(),
                Violation::ZeroWidth => "n_bits".to_string(),
                _ => "codes".to_string(),
            };
            return Err(Error::parse(location, report.to_string()));
        }
        Codebook::new(codes, self.k_hot, self.provenance, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(ws: &[&str]) -> Vec<Codeword> {
        ws.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn valid_codebook_has_empty_report() {
        let cb = Codebook::new(
            words(&["110", "011", "101"]),
            KHot::Fixed(2),
            Provenance::OptimizedUnweighted,
            Some(1),
        )
        .unwrap();
        assert!(cb.validate().is_valid());
    }

    #[test]
    fn duplicate_pair_is_reported_with_indices() {
        let codes = words(&["100000", "010000", "001000", "000100", "000010", "001000"]);
        let report = validate_codebook(&codes, 6, KHot::Fixed(1));
        assert_eq!(
            report.violations,
            vec![Violation::Duplicate { first: 2, second: 5 }]
        );
    }

    #[test]
    fn popcount_violation_is_reported() {
        let codes = words(&["11100", "11000", "00111"]);
        let report = validate_codebook(&codes, 5, KHot::Fixed(3));
        assert_eq!(
            report.violations,
            vec![Violation::Popcount {
                class: 1,
                expected: 3,
                found: 2
            }]
        );
    }

    #[test]
    fn length_and_width_violations() {
        let codes = words(&["1100", "011"]);
        let report = validate_codebook(&codes, 4, KHot::Mixed);
        assert!(report.violations.contains(&Violation::Length {
            class: 1,
            expected: 4,
            found: 3
        }));
        assert!(matches!(
            Codebook::new(codes, KHot::Mixed, Provenance::Random, None),
            Err(Error::InvalidCodebook(_))
        ));
    }

    #[test]
    fn json_keys_and_round_trip() {
        let cb = Codebook::new(
            words(&["1100", "0011"]),
            KHot::Fixed(2),
            Provenance::Random,
            Some(42),
        )
        .unwrap();
        let text = cb.to_json();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["n_classes"], 2);
        assert_eq!(value["n_bits"], 4);
        assert_eq!(value["k_hot"], 2);
        assert_eq!(value["provenance"], "random");
        assert_eq!(value["seed"], 42);
        assert_eq!(value["codes"][1], "0011");
        assert_eq!(Codebook::from_json(&text).unwrap(), cb);

        let mixed = Codebook::new(words(&["011", "101"]), KHot::Mixed, Provenance::Hadamard, None)
            .unwrap();
        let text = mixed.to_json();
        assert!(text.contains("\"mixed\""));
        assert!(text.contains("\"seed\": null"));
        assert_eq!(Codebook::from_json(&text).unwrap(), mixed);
    }

    #[test]
    fn parse_rejects_unequal_lengths() {
        let doc = r#"{"n_classes":2,"n_bits":4,"k_hot":"mixed","provenance":"random","seed":null,"codes":["1100","011"]}"#;
        match Codebook::from_json(doc) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "codes[1]"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_class_count_mismatch() {
        let codes: Vec<String> = (0..9).map(|i| format!("\"{}\"", one_hot_str(i, 10))).collect();
        let doc = format!(
            r#"{{"n_classes":10,"n_bits":10,"k_hot":1,"provenance":"one_hot","seed":null,"codes":[{}]}}"#,
            codes.join(",")
        );
        match Codebook::from_json(&doc) {
            Err(Error::Parse { location, message }) => {
                assert_eq!(location, "codes");
                assert!(message.contains("9 codes"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_reports_json_syntax_location() {
        match Codebook::from_json("{\"n_classes\": 2,\n \"n_bits\": }") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 2")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    fn one_hot_str(i: usize, n: usize) -> String {
        (0..n).map(|j| if i == j { '1' } else { '0' }).collect()
    }
}
