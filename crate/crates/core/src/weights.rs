//! Symmetric class-similarity weights `w[i][j]`.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    w: Vec<f64>,
}

impl WeightMatrix {
    /// Builds a weight matrix from rows, checking symmetry, non-negativity,
    /// a zero diagonal and at least one positive off-diagonal entry.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut w = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "weight row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            w.extend_from_slice(row);
        }
        Self::from_flat(n, w)
    }

    pub fn from_flat(n: usize, w: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "weight matrices need at least 2 classes, got {n}"
            )));
        }
        crate::error::check_dim("weight matrix entries", n * n, w.len())?;
        let mut any_positive = false;
        for i in 0..n {
            for j in 0..n {
                let v = w[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "w[{i}][{j}] = {v} must be finite and non-negative"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "diagonal entry w[{i}][{i}] = {v} must be zero"
                    )));
                }
                if v != w[j * n + i] {
                    return Err(Error::InvalidArgument(format!(
                        "w[{i}][{j}] = {v} differs from w[{j}][{i}] = {}",
                        w[j * n + i]
                    )));
                }
                any_positive |= v > 0.0;
            }
        }
        if !any_positive {
            return Err(Error::DegenerateWeights(
                "no off-diagonal weight is positive".into(),
            ));
        }
        Ok(WeightMatrix { n, w })
    }

    /// All off-diagonal weights 1.
    pub fn uniform(n: usize) -> Result<Self> {
        let w = (0..n * n)
            .map(|k| if k / n == k % n { 0.0 } else { 1.0 })
            .collect();
        Self::from_flat(n, w)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.n..(i + 1) * self.n]
    }

    /// Multiplies every entry by a positive factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scale factor {factor} must be positive"
            )));
        }
        Self::from_flat(self.n, self.w.iter().map(|v| v * factor).collect())
    }

    /// Relabels classes: entry `(i, j)` of the result is `w[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        crate::error::check_dim("permutation length", self.n, perm.len())?;
        let n = self.n;
        let w = (0..n * n)
            .map(|k| self.get(perm[k / n], perm[k % n]))
            .collect();
        Self::from_flat(n, w)
    }

    pub fn is_uniform(&self) -> bool {
        let first = self.get(0, 1);
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == first))
    }

    /// CSV with `n` rows of `n` columns and no header.
    pub fn to_csv_string(&self) -> String {
        let mut wtr = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(Vec::new());
        for i in 0..self.n {
            wtr.write_record(self.row(i).iter().map(|v| v.to_string()))
                .expect("in-memory csv write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory csv flush")).expect("utf8 csv")
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let rows = parse_csv_grid(text, |s| s.parse::<f64>().ok(), "real")?;
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

/// Parses a header-less square-or-not numeric CSV grid.
pub(crate) fn parse_csv_grid<T>(
    text: &str,
    parse: impl Fn(&str) -> Option<T>,
    kind: &str,
) -> Result<Vec<Vec<T>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let mut row = Vec::with_capacity(rec.len());
        for (j, field) in rec.iter().enumerate() {
            let v = parse(field).ok_or_else(|| {
                Error::parse(
                    format!("row {} column {}", i + 1, j + 1),
                    format!("expected {kind}, found {field:?}"),
                )
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    Ok(rows)
}
