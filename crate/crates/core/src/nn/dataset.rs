use std::path::Path;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::seeding::{rng, sub_seed};

/// Labelled samples stored row-major: sample `i` is `features[i*dim..(i+1)*dim]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    dim: usize,
    labels: Vec<usize>,
    n_classes: usize,
}

impl Dataset {
    pub fn new(features: Vec<f64>, dim: usize, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("a dataset needs at least one sample".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("feature width must be positive".into()));
        }
        crate::error::check_dim("dataset features", labels.len() * dim, features.len())?;
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= n_classes) {
            return Err(Error::InvalidArgument(format!(
                "label {l} of sample {i} is outside 0..{n_classes}"
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset features"));
        }
        Ok(Dataset {
            features,
            dim,
            labels,
            n_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    /// Same labels with every sample replaced by `f(index, sample)`.
    pub fn map_samples(
        &self,
        mut f: impl FnMut(usize, &[f64]) -> Result<Vec<f64>>,
    ) -> Result<Dataset> {
        let mut features = Vec::with_capacity(self.features.len());
        for i in 0..self.len() {
            let out = f(i, self.sample(i))?;
            crate::error::check_dim("mapped sample width", self.dim, out.len())?;
            features.extend(out);
        }
        Dataset::new(features, self.dim, self.labels.clone(), self.n_classes)
    }

    /// Number of samples per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// CSV with header `label,f0,f1,...` and one row per sample.
    pub fn to_csv_string(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let header: Vec<String> = std::iter::once("label".to_string())
            .chain((0..self.dim).map(|j| format!("f{j}")))
            .collect();
        wtr.write_record(&header).expect("in-memory csv write");
        for i in 0..self.len() {
            let row = std::iter::once(self.labels[i].to_string())
                .chain(self.sample(i).iter().map(|v| v.to_string()));
            wtr.write_record(row).expect("in-memory csv write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory csv flush")).expect("utf8 csv")
    }

    /// Parses the CSV format. The class count is taken from `n_classes` when
    /// given, otherwise from the largest label.
    pub fn from_csv_str(text: &str, n_classes: Option<usize>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = rdr.headers()?.clone();
        if header.get(0) != Some("label") {
            return Err(Error::parse("header", "first column must be \"label\""));
        }
        let dim = header.len() - 1;
        for (j, name) in header.iter().skip(1).enumerate() {
            if name != format!("f{j}") {
                return Err(Error::parse(
                    format!("header column {}", j + 2),
                    format!("expected \"f{j}\", found {name:?}"),
                ));
            }
        }
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let label: usize = rec[0].parse().map_err(|_| {
                Error::parse(format!("line {line} column 1"), format!("bad label {:?}", &rec[0]))
            })?;
            labels.push(label);
            for j in 1..rec.len() {
                let v: f64 = rec[j].parse().map_err(|_| {
                    Error::parse(
                        format!("line {line} column {}", j + 1),
                        format!("bad feature {:?}", &rec[j]),
                    )
                })?;
                features.push(v);
            }
        }
        let n_classes = match n_classes {
            Some(n) => n,
            None => labels.iter().max().map_or(0, |m| m + 1),
        };
        Dataset::new(features, dim, labels, n_classes)
    }

    pub fn read_csv(path: impl AsRef<Path>, n_classes: Option<usize>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_csv_str(&text, n_classes)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::file(path, e))
    }
}

/// Isotropic Gaussian clusters in `[0,1]^dim`, one per class.
#[derive(Clone, Debug)]
pub struct BlobSpec {
    pub n_classes: usize,
    pub dim: usize,
    /// Standard deviation of each cluster around its center.
    pub spread: f64,
    /// Centers are drawn uniformly from `[margin, 1 - margin]^dim`.
    pub margin: f64,
    pub seed: u64,
}

impl BlobSpec {
    pub fn new(n_classes: usize, dim: usize, spread: f64, seed: u64) -> Self {
        BlobSpec {
            n_classes,
            dim,
            spread,
            margin: 0.2,
            seed,
        }
    }

    pub fn centers(&self) -> Vec<Vec<f64>> {
        let mut r = rng(sub_seed(self.seed, 0));
        (0..self.n_classes)
            .map(|_| {
                (0..self.dim)
                    .map(|_| r.random_range(self.margin..=1.0 - self.margin))
                    .collect()
            })
            .collect()
    }

    /// `per_class` samples per class drawn from noise stream `stream`;
    /// different streams share the same centers.
    pub fn sample(&self, per_class: usize, stream: u64) -> Result<Dataset> {
        if self.n_classes == 0 || self.dim == 0 || per_class == 0 {
            return Err(Error::InvalidArgument(
                "blobs need positive class count, width and samples".into(),
            ));
        }
        let normal = Normal::new(0.0, self.spread)
            .map_err(|e| Error::InvalidArgument(format!("spread: {e}")))?;
        let centers = self.centers();
        let mut r = rng(sub_seed(self.seed, 1 + stream));
        let m = per_class * self.n_classes;
        let mut features = Vec::with_capacity(m * self.dim);
        let mut labels = Vec::with_capacity(m);
        for i in 0..m {
            let class = i % self.n_classes;
            labels.push(class);
            for &c in &centers[class] {
                features.push((c + normal.sample(&mut r)).clamp(0.0, 1.0));
            }
        }
        Dataset::new(features, self.dim, labels, self.n_classes)
    }
}

const DIGIT_SIDE: usize = 12;

/// Seven-segment masks (a, b, c, d, e, f, g) for digits 0-9.
const SEGMENTS: [[bool; 7]; 10] = [
    [true, true, true, true, true, true, false],
    [false, true, true, false, false, false, false],
    [true, true, false, true, true, false, true],
    [true, true, true, true, false, false, true],
    [false, true, true, false, false, true, true],
    [true, false, true, true, false, true, true],
    [true, false, true, true, true, true, true],
    [true, true, true, false, false, false, false],
    [true, true, true, true, true, true, true],
    [true, true, true, true, false, true, true],
];

/// Small grayscale digit images (12x12, flattened row-major) rendered from
/// seven-segment glyphs with random shifts, stroke intensity and pixel noise.
pub fn synthetic_digits(per_class: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if per_class == 0 {
        return Err(Error::InvalidArgument("per_class must be positive".into()));
    }
    let normal =
        Normal::new(0.0, noise).map_err(|e| Error::InvalidArgument(format!("noise: {e}")))?;
    let mut r = rng(seed);
    let side = DIGIT_SIDE;
    let mut features = Vec::with_capacity(per_class * 10 * side * side);
    let mut labels = Vec::with_capacity(per_class * 10);
    for i in 0..per_class * 10 {
        let digit = i % 10;
        let dx: i32 = r.random_range(-1..=1);
        let dy: i32 = r.random_range(-1..=1);
        let ink: f64 = r.random_range(0.7..=1.0);
        let mut img = vec![0.0; side * side];
        // glyph box: columns 3..=8, rows 1..=10
        let (l, rgt, top, mid, bot) = (3i32, 8i32, 1i32, 5i32, 10i32);
        let mut stroke = |x0: i32, y0: i32, x1: i32, y1: i32| {
            for y in y0.min(y1)..=y0.max(y1) {
                for x in x0.min(x1)..=x0.max(x1) {
                    let (px, py) = (x + dx, y + dy);
                    if (0..side as i32).contains(&px) && (0..side as i32).contains(&py) {
                        img[py as usize * side + px as usize] = ink;
                    }
                }
            }
        };
        let seg = SEGMENTS[digit];
        if seg[0] {
            stroke(l, top, rgt, top);
        }
        if seg[1] {
            stroke(rgt, top, rgt, mid);
        }
        if seg[2] {
            stroke(rgt, mid, rgt, bot);
        }
        if seg[3] {
            stroke(l, bot, rgt, bot);
        }
        if seg[4] {
            stroke(l, mid, l, bot);
        }
        if seg[5] {
            stroke(l, top, l, mid);
        }
        if seg[6] {
            stroke(l, mid, rgt, mid);
        }
        for v in img.iter_mut() {
            *v = (*v + normal.sample(&mut r)).clamp(0.0, 1.0);
        }
        features.extend(img);
        labels.push(digit);
    }
    Dataset::new(features, side * side, labels, 10)
}

/// Side length of [`synthetic_digits`] images.
pub const DIGIT_IMAGE_SIDE: usize = DIGIT_SIDE;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let ds = Dataset::new(vec![0.0, 0.25, 1.0, 1.0 / 3.0], 2, vec![1, 0], 2).unwrap();
        let text = ds.to_csv_string();
        assert!(text.starts_with("label,f0,f1\n"));
        assert_eq!(Dataset::from_csv_str(&text, Some(2)).unwrap(), ds);
    }

    #[test]
    fn csv_errors_name_location() {
        let bad = "label,f0\n0,0.5\n1,abc\n";
        match Dataset::from_csv_str(bad, None) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "line 3 column 2"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Dataset::from_csv_str("lbl,f0\n0,1\n", None).is_err());
        assert!(Dataset::from_csv_str("label,f0\n3,1\n", Some(2)).is_err());
    }

    #[test]
    fn invariants_enforced() {
        assert!(Dataset::new(vec![], 2, vec![], 2).is_err());
        assert!(Dataset::new(vec![f64::NAN, 0.0], 2, vec![0], 2).is_err());
        assert!(Dataset::new(vec![0.0, 0.0], 2, vec![2], 2).is_err());
    }

    #[test]
    fn blobs_are_balanced_and_in_range() {
        let spec = BlobSpec::new(3, 4, 0.1, 7);
        let ds = spec.sample(10, 0).unwrap();
        assert_eq!(ds.len(), 30);
        assert_eq!(ds.class_counts(), vec![10, 10, 10]);
        assert!(ds.features().iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(ds, spec.sample(10, 0).unwrap());
        assert_ne!(ds, spec.sample(10, 1).unwrap());
    }

    #[test]
    fn digits_render() {
        let ds = synthetic_digits(2, 0.05, 1).unwrap();
        assert_eq!(ds.dim(), 144);
        assert_eq!(ds.len(), 20);
        // an eight has more ink than a one
        let ink = |i: usize| ds.sample(i).iter().sum::<f64>();
        assert!(ink(8) > ink(1));
    }
}
