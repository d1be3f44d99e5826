//! Class-similarity weights from confusion counts.

use std::path::Path;

use crate::baseline::one_hot;
use crate::error::{Error, Result};
use crate::nn::{predict, Dataset, DecodeRule, MlpModel};
use crate::weights::{parse_csv_grid, WeightMatrix};

/// Added to every off-diagonal similarity so no pair gets zero weight.
pub const DEFAULT_FLOOR: f64 = 0.05;

/// `counts[i][j]`: samples of true class `i` predicted as class `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    n: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn zeros(n: usize) -> Self {
        ConfusionMatrix {
            n,
            counts: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("confusion matrix is empty".into()));
        }
        let mut counts = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::parse(
                    format!("row {}", i + 1),
                    format!("expected {n} columns, found {}", row.len()),
                ));
            }
            counts.extend_from_slice(row);
        }
        Ok(ConfusionMatrix { n, counts })
    }

    pub fn from_predictions(n: usize, truth: &[usize], predicted: &[usize]) -> Result<Self> {
        crate::error::check_dim("prediction count", truth.len(), predicted.len())?;
        let mut cm = Self::zeros(n);
        for (&t, &p) in truth.iter().zip(predicted) {
            if t >= n || p >= n {
                return Err(Error::InvalidArgument(format!(
                    "class pair ({t}, {p}) outside 0..{n}"
                )));
            }
            cm.counts[t * n + p] += 1;
        }
        Ok(cm)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.n + j]
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.counts[i * self.n..(i + 1) * self.n].iter().sum()
    }

    pub fn column_sum(&self, j: usize) -> u64 {
        (0..self.n).map(|i| self.get(i, j)).sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let rows = parse_csv_grid(text, |s| s.parse::<u64>().ok(), "non-negative integer")?;
        Self::from_rows(&rows)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_csv_str(&text)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::file(path, e))
    }
}

/// Symmetric pairwise confusion rate before the floor and normalization.
pub fn pair_similarity(cm: &ConfusionMatrix, i: usize, j: usize) -> f64 {
    let denom = cm.row_sum(i) + cm.row_sum(j);
    if denom == 0 {
        0.0
    } else {
        (cm.get(i, j) + cm.get(j, i)) as f64 / denom as f64
    }
}

/// `w_ij = s_ij + floor`, zero diagonal, scaled so the largest entry is 1.
pub fn confusion_to_weights(cm: &ConfusionMatrix, floor: f64) -> Result<WeightMatrix> {
    if !(floor >= 0.0 && floor.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "floor must be finite and non-negative, got {floor}"
        )));
    }
    let n = cm.n();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "weights need at least 2 classes, got {n}"
        )));
    }
    let mut w = vec![0.0; n * n];
    let mut max = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let v = pair_similarity(cm, i, j) + floor;
            w[i * n + j] = v;
            w[j * n + i] = v;
            max = max.max(v);
        }
    }
    if max == 0.0 {
        return Err(Error::DegenerateWeights(
            "no off-diagonal confusion and a zero floor".into(),
        ));
    }
    w.iter_mut().for_each(|v| *v /= max);
    WeightMatrix::from_flat(n, w)
}

pub fn uniform_weights(n: usize) -> Result<WeightMatrix> {
    WeightMatrix::uniform(n)
}

/// Confusion of a one-hot model on `data`.
pub fn estimate_confusion(model: &MlpModel, data: &Dataset) -> Result<ConfusionMatrix> {
    let cb = one_hot(data.n_classes())?;
    let predicted = predict(model, data, &cb, DecodeRule::Bce)?;
    ConfusionMatrix::from_predictions(data.n_classes(), data.labels(), &predicted)
}
