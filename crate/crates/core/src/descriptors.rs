//! Covariance descriptors of grayscale images.
//!
//! Each interior pixel gets `F = [I, |∂ᵤI|, |∂ᵥI|, |∂ᵤᵤI|, |∂ᵥᵥI|]` from
//! central differences with unit spacing (`u` runs along a row, `v` down a
//! column). Features at a `G × G` grid of interior vertices are pooled into an
//! MLE covariance, and `ε·I` keeps the result positive definite. Images are
//! used at their stored size; resizing is left to the caller.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{PdMatrix, SymMatrix};

pub const FEATURES: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    /// Row-major intensities; 8-bit sources are expected scaled to `[0, 1]`.
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width < 3 || height < 3 {
            return Err(invalid("image must be at least 3x3"));
        }
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                found: pixels.len(),
            });
        }
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { width, height, pixels })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let pixels = (0..height).flat_map(|v| (0..width).map(move |u| (u, v))).map(|(u, v)| f(u, v)).collect();
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Intensity at column `u`, row `v`.
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.pixels[v * self.width + u]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.height, self.width, |u, v| self.get(v, u)).expect("same pixels")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptorConfig {
    pub grid: usize,
    pub epsilon: f64,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        Self { grid: 32, epsilon: 1e-8 }
    }
}

/// Features of the interior pixels `1..width−1 × 1..height−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    width: usize,
    height: usize,
    features: Vec<[f64; FEATURES]>,
}

impl FeatureMap {
    /// Features at image column `u` and row `v`, both interior.
    pub fn at(&self, u: usize, v: usize) -> &[f64; FEATURES] {
        assert!(u >= 1 && v >= 1 && u + 1 < self.width && v + 1 < self.height, "border pixel ({u}, {v})");
        &self.features[(v - 1) * (self.width - 2) + (u - 1)]
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

pub fn feature_stack(img: &GrayImage) -> FeatureMap {
    let (w, h) = (img.width, img.height);
    let mut features = Vec::with_capacity((w - 2) * (h - 2));
    for v in 1..h - 1 {
        for u in 1..w - 1 {
            let c = img.get(u, v);
            let (l, r) = (img.get(u - 1, v), img.get(u + 1, v));
            let (t, b) = (img.get(u, v - 1), img.get(u, v + 1));
            features.push([
                c,
                (0.5 * (r - l)).abs(),
                (0.5 * (b - t)).abs(),
                (r - 2.0 * c + l).abs(),
                (b - 2.0 * c + t).abs(),
            ]);
        }
    }
    FeatureMap {
        width: w,
        height: h,
        features,
    }
}

/// `g` evenly spaced interior indices in `1..=n−2`.
fn grid_positions(n: usize, g: usize) -> Vec<usize> {
    let span = (n - 3) as f64;
    (0..g)
        .map(|i| 1 + ((i as f64) * span / (g - 1) as f64).round() as usize)
        .collect()
}

/// `Cov(F)` over the grid vertices plus `ε·I`, in PD(5).
pub fn covariance_descriptor(img: &GrayImage, cfg: &DescriptorConfig) -> Result<PdMatrix> {
    if cfg.grid < 2 {
        return Err(invalid("descriptor grid needs at least 2 vertices per side"));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon.is_finite()) {
        return Err(invalid("descriptor regularization must be positive"));
    }
    if img.width - 2 < cfg.grid || img.height - 2 < cfg.grid {
        return Err(invalid(alloc::format!(
            "a {0}x{0} grid does not fit in the {1}x{2} interior",
            cfg.grid,
            img.width - 2,
            img.height - 2
        )));
    }
    let fmap = feature_stack(img);
    let us = grid_positions(img.width, cfg.grid);
    let vs = grid_positions(img.height, cfg.grid);
    let samples: Vec<&[f64; FEATURES]> = vs.iter().flat_map(|&v| us.iter().map(move |&u| (u, v))).map(|(u, v)| fmap.at(u, v)).collect();
    let n = samples.len() as f64;
    let mut mean = [0.0; FEATURES];
    for s in &samples {
        for j in 0..FEATURES {
            mean[j] += s[j];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let cov = SymMatrix::from_fn(FEATURES, |a, b| {
        let c: f64 = samples.iter().map(|s| (s[a] - mean[a]) * (s[b] - mean[b])).sum::<f64>() / n;
        if a == b {
            c + cfg.epsilon
        } else {
            c
        }
    })?;
    PdMatrix::new(cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Seed, SymRng};
    use alloc::vec;

    fn random_image(w: usize, h: usize, seed: u64) -> GrayImage {
        let mut rng = SymRng::new(Seed(seed));
        let px = (0..w * h).map(|_| rng.uniform()).collect();
        GrayImage::new(w, h, px).unwrap()
    }

    #[test]
    fn rejects_small_or_bad_images() {
        assert!(GrayImage::new(2, 5, vec![0.0; 10]).is_err());
        assert!(GrayImage::new(3, 3, vec![0.0; 8]).is_err());
        assert!(GrayImage::new(3, 3, vec![f64::NAN; 9]).is_err());
        let img = random_image(10, 10, 1);
        let cfg = DescriptorConfig { grid: 9, epsilon: 1e-8 };
        assert!(covariance_descriptor(&img, &cfg).is_err());
        assert!(covariance_descriptor(&img, &DescriptorConfig { grid: 1, epsilon: 1e-8 }).is_err());
        assert!(covariance_descriptor(&img, &DescriptorConfig { grid: 4, epsilon: 0.0 }).is_err());
    }

    #[test]
    fn constant_image() {
        let img = GrayImage::from_fn(8, 6, |_, _| 0.4).unwrap();
        let f = feature_stack(&img);
        assert_eq!(f.len(), 6 * 4);
        assert_eq!(f.at(3, 2), &[0.4, 0.0, 0.0, 0.0, 0.0]);
        let cfg = DescriptorConfig { grid: 4, epsilon: 1e-8 };
        let x = covariance_descriptor(&img, &cfg).unwrap();
        assert_eq!(x.as_sym(), &SymMatrix::identity(5).scale(1e-8));
    }

    #[test]
    fn ramp_and_quadratic_derivatives() {
        let w = 12;
        let ramp = GrayImage::from_fn(w, 7, |u, _| u as f64 / w as f64).unwrap();
        let f = feature_stack(&ramp);
        for v in 1..6 {
            for u in 1..w - 1 {
                let p = f.at(u, v);
                assert!((p[1] - 1.0 / w as f64).abs() < 1e-15);
                assert_eq!(p[2], 0.0);
                assert!(p[3] < 1e-15 && p[4] == 0.0);
            }
        }
        let quad = GrayImage::from_fn(w, 7, |u, _| (u * u) as f64).unwrap();
        let f = feature_stack(&quad);
        for u in 1..w - 1 {
            assert_eq!(f.at(u, 3)[3], 2.0);
            assert_eq!(f.at(u, 3)[1], 2.0 * u as f64);
        }
    }

    #[test]
    #[should_panic(expected = "border pixel")]
    fn border_pixels_are_excluded() {
        feature_stack(&random_image(5, 5, 2)).at(0, 2);
    }

    #[test]
    fn grid_spans_the_interior() {
        assert_eq!(grid_positions(10, 2), vec![1, 8]);
        assert_eq!(grid_positions(10, 8), vec![1, 2, 3, 4, 5, 6, 7, 8]);
        let g = grid_positions(130, 32);
        assert_eq!((g[0], g[31]), (1, 128));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn random_images_give_pd_descriptors() {
        for seed in 0..10 {
            let x = covariance_descriptor(&random_image(40, 36, seed), &DescriptorConfig::default()).unwrap();
            assert!(PdMatrix::new(x.as_sym().clone()).is_ok());
        }
    }

    #[test]
    fn shift_leaves_derivative_block_unchanged() {
        let img = random_image(40, 40, 3);
        let shifted = GrayImage::from_fn(40, 40, |u, v| img.get(u, v) + 0.25).unwrap();
        let cfg = DescriptorConfig::default();
        let (a, b) = (covariance_descriptor(&img, &cfg).unwrap(), covariance_descriptor(&shifted, &cfg).unwrap());
        for i in 1..5 {
            for j in 1..5 {
                assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-15);
            }
        }
        // Variance of the intensity itself is shift invariant too; the mean is not stored.
        assert!((a.get(0, 0) - b.get(0, 0)).abs() < 1e-14);
    }

    #[test]
    fn transpose_swaps_feature_pairs() {
        let img = random_image(45, 38, 4);
        let cfg = DescriptorConfig { grid: 20, epsilon: 1e-8 };
        let a = covariance_descriptor(&img, &cfg).unwrap();
        let b = covariance_descriptor(&img.transpose(), &cfg).unwrap();
        let perm = [0, 2, 1, 4, 3];
        for i in 0..5 {
            for j in 0..5 {
                assert!((a.get(i, j) - b.get(perm[i], perm[j])).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn deterministic() {
        let img = random_image(50, 50, 5);
        let cfg = DescriptorConfig::default();
        assert_eq!(covariance_descriptor(&img, &cfg).unwrap(), covariance_descriptor(&img, &cfg).unwrap());
    }
}
