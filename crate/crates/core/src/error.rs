use std::path::PathBuf;

use crate::codebook::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    /// Not enough distinct K-hot words (or Hadamard rows) to fill the codebook.
    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("exhaustive search space has {size} ordered selections, above the cap of {cap}")]
    InstanceTooLarge { size: u128, cap: u128 },

    #[error("no codebook with minimum distance >= {floor} was found")]
    FloorUnreachable { floor: u32 },

    #[error("invalid codebook: {0}")]
    InvalidCodebook(ValidationReport),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("degenerate weights: {0}")]
    DegenerateWeights(String),

    #[error("training diverged at epoch {epoch}: mean loss {loss}")]
    Divergence { epoch: usize, loss: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
