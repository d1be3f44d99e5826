//! Test-set corruptions: negatives, Gaussian blur, salt-and-pepper noise and FGSM.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;

use crate::codebook::Codebook;
use crate::error::{check_dim, Error, Result};
use crate::nn::{Dataset, MlpModel};
use crate::seeding::{rng, sub_seed};

fn check_unit_range(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(i) => Err(Error::InvalidArgument(format!(
            "pixel {i} = {} lies outside [0, 1]",
            x[i]
        ))),
        None => Ok(()),
    }
}

pub fn negative(x: &[f64]) -> Result<Vec<f64>> {
    check_unit_range(x)?;
    Ok(x.iter().map(|v| 1.0 - v).collect())
}

/// Normalized 1-D Gaussian taps for offsets `-r..=r` with `r = ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "blur sigma must be positive, got {sigma}"
        )));
    }
    let r = (3.0 * sigma).ceil() as i64;
    let taps: Vec<f64> = (-r..=r)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    Ok(taps.into_iter().map(|t| t / total).collect())
}

/// Mirror index into `0..n`, repeating the edge sample (`-1 -> 0`, `n -> n-1`).
fn reflect(i: i64, n: usize) -> usize {
    let n = n as i64;
    let m = i.rem_euclid(2 * n);
    (if m < n { m } else { 2 * n - 1 - m }) as usize
}

/// Separable Gaussian blur of a row-major `h x w` image without clamping.
pub fn gaussian_blur_unclamped(x: &[f64], shape: (usize, usize), sigma: f64) -> Result<Vec<f64>> {
    let (h, w) = shape;
    check_dim("image size", h * w, x.len())?;
    let k = gaussian_kernel(sigma)?;
    let r = (k.len() / 2) as i64;
    let mut tmp = vec![0.0; x.len()];
    for y in 0..h {
        for c in 0..w {
            tmp[y * w + c] = k
                .iter()
                .enumerate()
                .map(|(t, kv)| kv * x[y * w + reflect(c as i64 + t as i64 - r, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; x.len()];
    for y in 0..h {
        for c in 0..w {
            out[y * w + c] = k
                .iter()
                .enumerate()
                .map(|(t, kv)| kv * tmp[reflect(y as i64 + t as i64 - r, h) * w + c])
                .sum();
        }
    }
    Ok(out)
}

pub fn gaussian_blur(x: &[f64], shape: (usize, usize), sigma: f64) -> Result<Vec<f64>> {
    check_unit_range(x)?;
    let mut out = gaussian_blur_unclamped(x, shape, sigma)?;
    out.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
    Ok(out)
}

/// Sets exactly `round(p * D)` distinct pixels to 0 or 1, each with even odds.
pub fn salt_pepper(x: &[f64], p: f64, seed: u64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "salt-and-pepper fraction must lie in [0, 1], got {p}"
        )));
    }
    check_unit_range(x)?;
    let count = (p * x.len() as f64).round() as usize;
    let mut r = rng(seed);
    let mut out = x.to_vec();
    for i in rand::seq::index::sample(&mut r, x.len(), count.min(x.len())) {
        out[i] = if r.random_bool(0.5) { 1.0 } else { 0.0 };
    }
    Ok(out)
}

/// Gradient of the cross-entropy to `codebook[class]` with respect to the input.
pub fn input_gradient(
    model: &MlpModel,
    codebook: &Codebook,
    x: &[f64],
    class: usize,
) -> Result<Vec<f64>> {
    check_dim("model output width", codebook.n_bits(), model.output_dim())?;
    if class >= codebook.n_classes() {
        return Err(Error::InvalidArgument(format!(
            "class {class} outside 0..{}",
            codebook.n_classes()
        )));
    }
    let (_, _, g) = model.backprop(x, &codebook.code(class).to_targets())?;
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("input gradient"));
    }
    Ok(g)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// One signed gradient step of size `epsilon` away from the true codeword.
pub fn fgsm(
    model: &MlpModel,
    codebook: &Codebook,
    x: &[f64],
    class: usize,
    epsilon: f64,
) -> Result<Vec<f64>> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "FGSM epsilon must be non-negative, got {epsilon}"
        )));
    }
    let g = input_gradient(model, codebook, x, class)?;
    Ok(x.iter()
        .zip(&g)
        .map(|(v, gv)| (v + epsilon * sign(*gv)).clamp(0.0, 1.0))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PerturbationKind {
    Negative,
    GaussianBlur { sigma: f64 },
    SaltPepper { p: f64, seed: u64 },
    Fgsm { epsilon: f64 },
}

/// A corruption plus the image shape used by blur.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    /// `(height, width)`; when absent a square image is assumed.
    pub image_shape: Option<(usize, usize)>,
}

impl PerturbationSpec {
    pub fn new(kind: PerturbationKind) -> Self {
        PerturbationSpec {
            kind,
            image_shape: None,
        }
    }

    pub fn needs_model(&self) -> bool {
        matches!(self.kind, PerturbationKind::Fgsm { .. })
    }

    fn shape_for(&self, dim: usize) -> Result<(usize, usize)> {
        if let Some((h, w)) = self.image_shape {
            check_dim("image shape", dim, h * w)?;
            return Ok((h, w));
        }
        let side = (dim as f64).sqrt().round() as usize;
        if side * side != dim {
            return Err(Error::InvalidArgument(format!(
                "cannot infer a square image from {dim} features; give shape=HxW"
            )));
        }
        Ok((side, side))
    }

    /// Corrupts every sample. Salt-and-pepper sample `i` uses `sub_seed(seed, i)`.
    pub fn apply(&self, data: &Dataset, target: Option<(&MlpModel, &Codebook)>) -> Result<Dataset> {
        let shape = match self.kind {
            PerturbationKind::GaussianBlur { .. } => Some(self.shape_for(data.dim())?),
            _ => None,
        };
        if self.needs_model() && target.is_none() {
            return Err(Error::InvalidArgument(
                "FGSM needs a model and a codebook".into(),
            ));
        }
        let rows: Vec<Vec<f64>> = (0..data.len())
            .into_par_iter()
            .map(|i| {
                let x = data.sample(i);
                match self.kind {
                    PerturbationKind::Negative => negative(x),
                    PerturbationKind::GaussianBlur { sigma } => {
                        gaussian_blur(x, shape.unwrap(), sigma)
                    }
                    PerturbationKind::SaltPepper { p, seed } => salt_pepper(x, p, sub_seed(seed, i as u64)),
                    PerturbationKind::Fgsm { epsilon } => {
                        let (model, cb) = target.unwrap();
                        check_unit_range(x)?;
                        fgsm(model, cb, x, data.labels()[i], epsilon)
                    }
                }
            })
            .collect::<Result<_>>()?;
        let mut rows = rows.into_iter();
        data.map_samples(|_, _| Ok(rows.next().unwrap()))
    }
}

impl fmt::Display for PerturbationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PerturbationKind::Negative => write!(f, "negative")?,
            PerturbationKind::GaussianBlur { sigma } => write!(f, "blur:sigma={sigma}")?,
            PerturbationKind::SaltPepper { p, seed } => write!(f, "sp:p={p},seed={seed}")?,
            PerturbationKind::Fgsm { epsilon } => write!(f, "fgsm:eps={epsilon}")?,
        }
        if let Some((h, w)) = self.image_shape {
            let sep = if matches!(self.kind, PerturbationKind::Negative) { ":" } else { "," };
            write!(f, "{sep}shape={h}x{w}")?;
        }
        Ok(())
    }
}

impl FromStr for PerturbationSpec {
    type Err = Error;

    /// `negative`, `blur:sigma=1.0`, `sp:p=0.02,seed=7`, `fgsm:eps=0.1`;
    /// any kind also takes `shape=HxW`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::parse(format!("perturbation {s:?}"), msg);
        let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut params: Vec<(&str, &str)> = Vec::new();
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, found {part:?}")))?;
            if params.iter().any(|(pk, _)| *pk == k.trim()) {
                return Err(bad(format!("{k} given twice")));
            }
            params.push((k.trim(), v.trim()));
        }
        let mut take = |key: &str| -> Option<&str> {
            let at = params.iter().position(|(k, _)| *k == key)?;
            Some(params.remove(at).1)
        };
        let real = |key: &str, v: Option<&str>| -> Result<f64> {
            let v = v.ok_or_else(|| bad(format!("missing {key}")))?;
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("{key} must be a number, found {v:?}")))
        };
        let image_shape = match take("shape") {
            None => None,
            Some(v) => {
                let (h, w) = v
                    .split_once('x')
                    .ok_or_else(|| bad(format!("shape must look like HxW, found {v:?}")))?;
                let h: usize = h.parse().map_err(|_| bad(format!("bad height {h:?}")))?;
                let w: usize = w.parse().map_err(|_| bad(format!("bad width {w:?}")))?;
                if h == 0 || w == 0 {
                    return Err(bad("shape must be positive".into()));
                }
                Some((h, w))
            }
        };
        let kind = match name {
            "negative" => PerturbationKind::Negative,
            "blur" => {
                let sigma = real("sigma", take("sigma"))?;
                if sigma <= 0.0 {
                    return Err(bad(format!("sigma must be positive, got {sigma}")));
                }
                PerturbationKind::GaussianBlur { sigma }
            }
            "sp" => {
                let p = real("p", take("p"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad(format!("p must lie in [0, 1], got {p}")));
                }
                let seed = match take("seed") {
                    None => 0,
                    Some(v) => v.parse().map_err(|_| bad(format!("bad seed {v:?}")))?,
                };
                PerturbationKind::SaltPepper { p, seed }
            }
            "fgsm" => {
                let epsilon = real("eps", take("eps"))?;
                if epsilon < 0.0 {
                    return Err(bad(format!("eps must be non-negative, got {epsilon}")));
                }
                PerturbationKind::Fgsm { epsilon }
            }
            other => return Err(bad(format!("unknown kind {other:?}"))),
        };
        if let Some((k, _)) = params.first() {
            return Err(bad(format!("unexpected parameter {k:?}")));
        }
        Ok(PerturbationSpec { kind, image_shape })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_basics() {
        assert_eq!(negative(&[0.0, 0.0]).unwrap(), vec![1.0, 1.0]);
        assert!((negative(&[0.3]).unwrap()[0] - 0.7).abs() < 1e-15);
        assert!(negative(&[1.2]).is_err());
    }

    #[test]
    fn reflect_repeats_edges() {
        let idx: Vec<usize> = (-3..7).map(|i| reflect(i, 4)).collect();
        assert_eq!(idx, [2, 1, 0, 0, 1, 2, 3, 3, 2, 1]);
        assert_eq!(reflect(-5, 2), 0);
    }

    #[test]
    fn blur_keeps_constant_images() {
        let x = vec![0.4; 25];
        for sigma in [0.5, 1.0, 2.0] {
            let y = gaussian_blur(&x, (5, 5), sigma).unwrap();
            assert!(y.iter().all(|v| (v - 0.4).abs() < 1e-12));
        }
    }

    #[test]
    fn blur_impulse_center_is_kernel_peak() {
        let mut x = vec![0.0; 21 * 21];
        x[10 * 21 + 10] = 1.0;
        let y = gaussian_blur(&x, (21, 21), 1.0).unwrap();
        let k = gaussian_kernel(1.0).unwrap();
        assert_eq!(k.len(), 7);
        assert!((y[10 * 21 + 10] - k[3] * k[3]).abs() < 1e-15);
        assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(gaussian_blur(&x, (21, 20), 1.0).is_err());
        assert!(gaussian_blur(&x, (21, 21), 0.0).is_err());
    }

    #[test]
    fn salt_pepper_counts() {
        let x = vec![0.5; 100];
        assert_eq!(salt_pepper(&x, 0.0, 1).unwrap(), x);
        let y = salt_pepper(&x, 0.05, 1).unwrap();
        assert_eq!(y.iter().filter(|&&v| v != 0.5).count(), 5);
        assert_eq!(y, salt_pepper(&x, 0.05, 1).unwrap());
        assert!(salt_pepper(&x, 1.0, 3).unwrap().iter().all(|&v| v == 0.0 || v == 1.0));
        assert!(salt_pepper(&x, 1.5, 3).is_err());
    }

    #[test]
    fn spec_parsing() {
        let s: PerturbationSpec = "sp:p=0.02,seed=7".parse().unwrap();
        assert_eq!(s.kind, PerturbationKind::SaltPepper { p: 0.02, seed: 7 });
        assert_eq!(s.to_string(), "sp:p=0.02,seed=7");
        let b: PerturbationSpec = "blur:sigma=1.0,shape=4x3".parse().unwrap();
        assert_eq!(b.kind, PerturbationKind::GaussianBlur { sigma: 1.0 });
        assert_eq!(b.image_shape, Some((4, 3)));
        assert_eq!(b.to_string().parse::<PerturbationSpec>().unwrap(), b);
        let n: PerturbationSpec = "negative".parse().unwrap();
        assert_eq!(n.kind, PerturbationKind::Negative);
        assert_eq!(
            "fgsm:eps=0.1".parse::<PerturbationSpec>().unwrap().kind,
            PerturbationKind::Fgsm { epsilon: 0.1 }
        );
        for bad in ["blur", "blur:sigma=-1", "sp:p=2", "fgsm:eps=x", "swirl", "sp:p=0.1,q=2"] {
            assert!(bad.parse::<PerturbationSpec>().is_err(), "{bad}");
        }
    }
}
