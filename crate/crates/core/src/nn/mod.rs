//! Small dense network trained against codewords with per-bit cross-entropy.

pub mod dataset;
pub mod loss;
pub mod model;
pub mod train;

pub use dataset::{synthetic_digits, BlobSpec, Dataset, DIGIT_IMAGE_SIDE};
pub use loss::{bce_loss, decode, decode_with, DecodeRule, Decoder, PROB_CLAMP};
pub use model::{Gradients, MlpModel};
pub use train::{
    evaluate, evaluate_with, loss_trace_csv, predict, train, Evaluation, TrainConfig,
    TrainOutcome,
};
