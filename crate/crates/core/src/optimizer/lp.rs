//! LP-format integer program for the codebook design problem.
//!
//! Variables: `x_i_b` is bit `b` of class `i`; `y_i_j_b` (for `i < j`) is the
//! XOR of `x_i_b` and `x_j_b`, linearized with four inequalities. Each class
//! has exactly K hot bits, each pair differs in at least `max(1, floor)`
//! positions, and the objective maximizes `sum w_ij * sum_b y_i_j_b`.

use std::fmt::Write as _;
use std::path::Path;

use super::{MinDistanceFloor, OptimizerConfig};
use crate::error::{Error, Result};

/// Counts describing an emitted model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LpStats {
    pub x_vars: usize,
    pub y_vars: usize,
    pub popcount_rows: usize,
    pub xor_rows: usize,
    pub distance_rows: usize,
}

impl LpStats {
    pub fn variables(&self) -> usize {
        self.x_vars + self.y_vars
    }
}

/// Renders the model as LP-format text.
pub fn lp_model(cfg: &OptimizerConfig) -> Result<(String, LpStats)> {
    cfg.validate()?;
    let (n, bits, k) = (cfg.n_classes, cfg.n_bits, cfg.k_hot);
    let w = cfg.dense_weights();
    let min_sep = match cfg.min_distance_floor {
        MinDistanceFloor::Fixed(d) => d.max(1),
        _ => 1,
    };
    let mut stats = LpStats {
        x_vars: n * bits,
        y_vars: n * (n - 1) / 2 * bits,
        popcount_rows: n,
        xor_rows: 0,
        distance_rows: 0,
    };

    let mut out = String::new();
    let _ = writeln!(out, "\\ codebook design: {n} classes, {bits} bits, {k} hot");
    out.push_str("Maximize\n obj:");
    let mut first = true;
    for i in 0..n {
        for j in i + 1..n {
            for b in 0..bits {
                let coef = w[i * n + j];
                let sign = if first { " " } else { " + " };
                let _ = write!(out, "{sign}{coef} y_{i}_{j}_{b}");
                first = false;
            }
        }
    }
    if first {
        out.push_str(" 0 x_0_0");
    }
    out.push_str("\nSubject To\n");
    for i in 0..n {
        let terms: Vec<String> = (0..bits).map(|b| format!("x_{i}_{b}")).collect();
        let _ = writeln!(out, " pop_{i}: {} = {k}", terms.join(" + "));
    }
    for i in 0..n {
        for j in i + 1..n {
            for b in 0..bits {
                let (y, xi, xj) = (format!("y_{i}_{j}_{b}"), format!("x_{i}_{b}"), format!("x_{j}_{b}"));
                let _ = writeln!(out, " xa_{i}_{j}_{b}: {y} - {xi} + {xj} >= 0");
                let _ = writeln!(out, " xb_{i}_{j}_{b}: {y} + {xi} - {xj} >= 0");
                let _ = writeln!(out, " xc_{i}_{j}_{b}: {y} - {xi} - {xj} <= 0");
                let _ = writeln!(out, " xd_{i}_{j}_{b}: {y} + {xi} + {xj} <= 2");
                stats.xor_rows += 4;
            }
            let terms: Vec<String> = (0..bits).map(|b| format!("y_{i}_{j}_{b}")).collect();
            let _ = writeln!(out, " sep_{i}_{j}: {} >= {min_sep}", terms.join(" + "));
            stats.distance_rows += 1;
        }
    }
    out.push_str("Binary\n");
    for i in 0..n {
        for b in 0..bits {
            let _ = writeln!(out, " x_{i}_{b}");
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for b in 0..bits {
                let _ = writeln!(out, " y_{i}_{j}_{b}");
            }
        }
    }
    out.push_str("End\n");
    Ok((out, stats))
}

/// Writes the model to `path`.
pub fn export_lp(cfg: &OptimizerConfig, path: impl AsRef<Path>) -> Result<LpStats> {
    let (text, stats) = lp_model(cfg)?;
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::file(path, e))?;
    Ok(stats)
}
