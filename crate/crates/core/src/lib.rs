//! Multi-hot target codebooks that push confusable classes apart, plus a
//! small network harness for training against them and measuring robustness.
//!
//! ```
//! use mute::{optimizer::{local_search, OptimizerConfig}, min_pairwise_distance};
//!
//! let cfg = OptimizerConfig::new(4, 2).with_seed(1);
//! let result = local_search(&cfg).unwrap();
//! assert_eq!(result.objective, 16.0);
//! assert!(min_pairwise_distance(&result.codebook).unwrap() >= 2);
//! ```

pub mod baseline;
pub mod cli;
pub mod codebook;
pub mod codeword;
pub mod error;
pub mod nn;
pub mod objective;
pub mod optimizer;
pub mod perturb;
pub mod report;
pub mod seeding;
pub mod similarity;
pub mod weights;

pub use codebook::{validate_codebook, Codebook, KHot, Provenance, ValidationReport, Violation};
pub use codeword::Codeword;
pub use error::{Error, Result};
pub use objective::{hamming_distance, min_pairwise_distance, pairwise_distance_sum, weighted_objective};
pub use weights::WeightMatrix;
