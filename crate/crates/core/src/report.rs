//! Accuracy reports: machine JSON plus an aligned text table.

use std::time::Duration;

use serde::Serialize;

use crate::codebook::Provenance;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccuracyRow {
    pub test_set: String,
    pub samples: usize,
    pub accuracy: f64,
    /// Confusion CSV written for this row, if any.
    pub confusion_file: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Summary of one evaluation run. Wall times appear only in the text table so
/// the JSON is reproducible.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub codebook: String,
    pub model: String,
    pub dataset: String,
    pub provenance: Provenance,
    pub n_classes: usize,
    pub n_bits: usize,
    pub objective: f64,
    /// `"uniform"` or the weight file the objective was scored with.
    pub objective_weights: String,
    pub min_distance: u32,
    pub results: Vec<AccuracyRow>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "codebook {} ({}, {} classes x {} bits)\nobjective {} [{}], min distance {}\n\n",
            self.codebook,
            self.provenance,
            self.n_classes,
            self.n_bits,
            self.objective,
            self.objective_weights,
            self.min_distance
        );
        let header = ["test set", "samples", "accuracy", "time (s)"];
        let rows: Vec<[String; 4]> = self
            .results
            .iter()
            .map(|r| {
                [
                    r.test_set.clone(),
                    r.samples.to_string(),
                    format!("{:.2}%", 100.0 * r.accuracy),
                    format!("{:.3}", r.wall_time.as_secs_f64()),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: [&str; 4]| {
            format!(
                "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}\n",
                cells[0],
                cells[1],
                cells[2],
                cells[3],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3]
            )
        };
        out.push_str(&line(header));
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&line([&rule[0], &rule[1], &rule[2], &rule[3]]));
        for row in &rows {
            out.push_str(&line([&row[0], &row[1], &row[2], &row[3]]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> RunReport {
        RunReport {
            codebook: "cb.json".into(),
            model: "m.json".into(),
            dataset: "test.csv".into(),
            provenance: Provenance::OptimizedWeighted,
            n_classes: 3,
            n_bits: 4,
            objective: 10.0,
            objective_weights: "uniform".into(),
            min_distance: 2,
            results: vec![
                AccuracyRow {
                    test_set: "original".into(),
                    samples: 30,
                    accuracy: 1.0,
                    confusion_file: None,
                    wall_time: Duration::from_millis(5),
                },
                AccuracyRow {
                    test_set: "fgsm:eps=0.1".into(),
                    samples: 30,
                    accuracy: 0.5,
                    confusion_file: Some("c1.csv".into()),
                    wall_time: Duration::from_millis(7),
                },
            ],
        }
    }

    #[test]
    fn json_omits_wall_time() {
        let json = report().to_json();
        assert!(!json.contains("wall_time"));
        assert!(json.contains("\"provenance\": \"optimized_weighted\""));
        assert!(json.ends_with("}\n"));
    }

    #[test]
    fn table_is_aligned() {
        let t = report().to_table();
        let body: Vec<&str> = t.lines().skip(3).collect();
        assert_eq!(body.len(), 4);
        assert!(body.iter().all(|l| l.len() == body[0].len()));
        assert!(t.contains("50.00%"));
    }
}
