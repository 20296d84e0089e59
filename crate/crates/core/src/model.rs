//! Domain types shared by every stage of the pipeline.
//!
//! Rasters are stored row-major with `y` growing downward, so pixel `(x, y)`
//! lives at `y * width + x`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImageSize {
    width: usize,
    height: usize,
}

impl ImageSize {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidSize { width, height });
        }
        Ok(Self { width, height })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of pixels.
    #[inline]
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    /// Always false; an `ImageSize` holds at least one pixel.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> Result<usize> {
        pixel_index(x, y, *self)
    }

    /// Inverse of [`ImageSize::index`]; `index` must be `< len()`.
    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    /// Length of the image diagonal in pixels.
    pub fn diagonal(&self) -> f64 {
        ((self.width * self.width + self.height * self.height) as f64).sqrt()
    }

    fn check_len(&self, actual: usize) -> Result<()> {
        if actual != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual,
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_same(&self, other: ImageSize) -> Result<()> {
        if *self != other {
            return Err(Error::DimensionMismatch {
                left: *self,
                right: other,
            });
        }
        Ok(())
    }
}

impl fmt::Display for ImageSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// Row-major linear index of `(x, y)`.
pub fn pixel_index(x: usize, y: usize, size: ImageSize) -> Result<usize> {
    if x >= size.width || y >= size.height {
        return Err(Error::OutOfBounds {
            x,
            y,
            width: size.width,
            height: size.height,
        });
    }
    Ok(y * size.width + x)
}

/// Per-pixel detection score in `[0, 1]` for a single detection.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfidenceMap<T> {
    size: ImageSize,
    scores: Vec<T>,
}

impl<T: Scalar> ConfidenceMap<T> {
    /// Rejects NaN and anything outside `[0, 1]`.
    pub fn new(size: ImageSize, scores: Vec<T>) -> Result<Self> {
        size.check_len(scores.len())?;
        if let Some((index, value)) = scores
            .iter()
            .enumerate()
            .find(|(_, &s)| !(s >= T::zero() && s <= T::one()))
        {
            return Err(Error::ScoreOutOfRange {
                index,
                value: value.as_f64(),
            });
        }
        Ok(Self { size, scores })
    }

    /// Clamps every score into `[0, 1]` (NaN becomes 0) and reports how many
    /// values had to be touched.
    pub fn from_scores_clamped(size: ImageSize, mut scores: Vec<T>) -> Result<(Self, usize)> {
        size.check_len(scores.len())?;
        let mut clamped = 0;
        for s in scores.iter_mut() {
            let c = if s.is_nan() {
                T::zero()
            } else {
                s.max(T::zero()).min(T::one())
            };
            if c != *s || s.is_nan() {
                clamped += 1;
                *s = c;
            }
        }
        Ok((Self { size, scores }, clamped))
    }

    pub fn filled(size: ImageSize, value: T) -> Result<Self> {
        Self::new(size, vec![value; size.len()])
    }

    #[inline]
    pub fn size(&self) -> ImageSize {
        self.size
    }

    #[inline]
    pub fn scores(&self) -> &[T] {
        &self.scores
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Result<T> {
        Ok(self.scores[self.size.index(x, y)?])
    }

    pub fn into_scores(self) -> Vec<T> {
        self.scores
    }
}

/// 8-bit sRGB raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    size: ImageSize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(size: ImageSize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        size.check_len(pixels.len())?;
        Ok(Self { size, pixels })
    }

    pub fn filled(size: ImageSize, rgb: [u8; 3]) -> Self {
        Self {
            size,
            pixels: vec![rgb; size.len()],
        }
    }

    pub fn from_fn(size: ImageSize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Self {
        let pixels = (0..size.len())
            .map(|i| {
                let (x, y) = size.coords(i);
                f(x, y)
            })
            .collect();
        Self { size, pixels }
    }

    #[inline]
    pub fn size(&self) -> ImageSize {
        self.size
    }

    #[inline]
    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Result<[u8; 3]> {
        Ok(self.pixels[self.size.index(x, y)?])
    }
}

/// CIELAB raster, `[l, a, b]` per pixel with `l` in `[0, 100]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabImage<T> {
    size: ImageSize,
    pixels: Vec<[T; 3]>,
}

impl<T: Scalar> LabImage<T> {
    pub fn new(size: ImageSize, pixels: Vec<[T; 3]>) -> Result<Self> {
        size.check_len(pixels.len())?;
        let hundred = T::of(100.0);
        if let Some((index, px)) = pixels
            .iter()
            .enumerate()
            .find(|(_, px)| !(px[0] >= T::zero() && px[0] <= hundred))
        {
            return Err(Error::LightnessOutOfRange {
                index,
                value: px[0].as_f64(),
            });
        }
        Ok(Self { size, pixels })
    }

    #[inline]
    pub fn size(&self) -> ImageSize {
        self.size
    }

    #[inline]
    pub fn pixels(&self) -> &[[T; 3]] {
        &self.pixels
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    /// Confident background. After [`compute_roi`](crate::compute_roi) this is
    /// the far background, which takes no part in growing.
    Background,
    /// Background close enough to the uncertain band to join the RoI.
    NearBackground,
    Uncertain,
    Foreground,
}

impl RegionLabel {
    /// Whether the pixel participates in region growing.
    #[inline]
    pub fn in_roi(self) -> bool {
        self != RegionLabel::Background
    }

    /// Whether the pixel may found a Monte Carlo seed.
    #[inline]
    pub fn is_seedable(self) -> bool {
        matches!(self, RegionLabel::Foreground | RegionLabel::NearBackground)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionPartition {
    size: ImageSize,
    labels: Vec<RegionLabel>,
}

impl RegionPartition {
    pub fn new(size: ImageSize, labels: Vec<RegionLabel>) -> Result<Self> {
        size.check_len(labels.len())?;
        Ok(Self { size, labels })
    }

    pub fn filled(size: ImageSize, label: RegionLabel) -> Self {
        Self {
            size,
            labels: vec![label; size.len()],
        }
    }

    #[inline]
    pub fn size(&self) -> ImageSize {
        self.size
    }

    #[inline]
    pub fn labels(&self) -> &[RegionLabel] {
        &self.labels
    }

    pub fn count(&self, label: RegionLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn mask_of(&self, label: RegionLabel) -> Vec<bool> {
        self.labels.iter().map(|&l| l == label).collect()
    }
}

/// Which pool a seed was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeedOrigin {
    Foreground,
    Background,
    /// Placed on a regular grid, independent of the confidence map.
    Grid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Seed<T> {
    pub x: usize,
    pub y: usize,
    /// Lab color of the seed pixel, the initial cluster centroid color.
    pub color: [T; 3],
    pub origin: SeedOrigin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClusterMeta {
    pub origin: SeedOrigin,
    pub pixel_count: usize,
}

/// Output of one region-growing pass. `None` marks an orphan pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterMap {
    size: ImageSize,
    assignment: Vec<Option<u32>>,
    clusters: Vec<ClusterMeta>,
}

impl ClusterMap {
    pub(crate) fn from_parts(
        size: ImageSize,
        assignment: Vec<Option<u32>>,
        clusters: Vec<ClusterMeta>,
    ) -> Self {
        debug_assert_eq!(assignment.len(), size.len());
        Self {
            size,
            assignment,
            clusters,
        }
    }

    #[inline]
    pub fn size(&self) -> ImageSize {
        self.size
    }

    #[inline]
    pub fn assignment(&self) -> &[Option<u32>] {
        &self.assignment
    }

    #[inline]
    pub fn clusters(&self) -> &[ClusterMeta] {
        &self.clusters
    }

    pub fn orphan_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_none()).count()
    }
}

/// Final binary mask together with the averaged vote map it was cut from.
#[derive(Clone, Debug, PartialEq)]
pub struct SegMask<T> {
    size: ImageSize,
    labels: Vec<bool>,
    avg_votes: Vec<T>,
}

impl<T: Scalar> SegMask<T> {
    /// Labels each pixel foreground iff its vote is strictly above 0.5.
    pub fn from_votes(size: ImageSize, avg_votes: Vec<T>) -> Result<Self> {
        size.check_len(avg_votes.len())?;
        if let Some((index, v)) = avg_votes
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v >= T::zero() && v <= T::one()))
        {
            return Err(Error::ScoreOutOfRange {
                index,
                value: v.as_f64(),
            });
        }
        let half = T::of(0.5);
        let labels = avg_votes.iter().map(|&v| v > half).collect();
        Ok(Self {
            size,
            labels,
            avg_votes,
        })
    }

    /// Hard mask; votes are set to 1 for foreground and 0 elsewhere.
    pub fn from_labels(size: ImageSize, labels: Vec<bool>) -> Result<Self> {
        size.check_len(labels.len())?;
        let avg_votes = labels
            .iter()
            .map(|&l| if l { T::one() } else { T::zero() })
            .collect();
        Ok(Self {
            size,
            labels,
            avg_votes,
        })
    }

    pub fn empty(size: ImageSize) -> Self {
        Self {
            size,
            labels: vec![false; size.len()],
            avg_votes: vec![T::zero(); size.len()],
        }
    }

    #[inline]
    pub fn size(&self) -> ImageSize {
        self.size
    }

    #[inline]
    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    #[inline]
    pub fn avg_votes(&self) -> &[T] {
        &self.avg_votes
    }

    pub fn count_foreground(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Connectivity {
    #[default]
    Four,
    Eight,
}

impl Connectivity {
    /// Neighbour offsets in the fixed visiting order used during growth.
    pub fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
        const EIGHT: [(isize, isize); 8] = [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

impl TryFrom<u8> for Connectivity {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(format!("connectivity must be 4 or 8, got {other}")),
        }
    }
}

impl From<Connectivity> for u8 {
    fn from(c: Connectivity) -> u8 {
        match c {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

/// Knobs of the refinement pipeline.
///
/// The three thresholds default to the values tuned for FCIS score maps:
/// `tau0 = 0.4`, `tau_f = 1.5 * tau0`, `tau_b = 0`. The remaining defaults
/// follow the SNIC conventions, with `theta_s = seed_spacing^2` and
/// `theta_m = compactness^2` for a compactness of 10.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig<T> {
    /// Detector threshold; a pixel votes foreground when its score exceeds it.
    pub tau0: T,
    /// Scores at or above this are confident foreground.
    pub tau_f: T,
    /// Scores at or below this are confident background.
    pub tau_b: T,
    /// Number of Monte Carlo passes.
    pub n_s: usize,
    /// Desired average distance between seeds, in pixels.
    pub seed_spacing: T,
    pub theta_s: T,
    pub theta_m: T,
    /// Growth cap on the joint distance; nodes at or beyond it are never queued.
    pub d_max: T,
    pub connectivity: Connectivity,
    /// Chebyshev radius by which the uncertain band is widened into background.
    pub thicken_radius: usize,
    /// Euclidean depth of the near-background ring around the uncertain band.
    pub roi_margin: T,
    pub rng_seed: u64,
}

impl<T: Scalar> Default for RefineConfig<T> {
    fn default() -> Self {
        let spacing = T::of(8.0);
        let compactness = T::of(10.0);
        Self {
            tau0: T::of(0.4),
            tau_f: T::of(0.6),
            tau_b: T::zero(),
            n_s: 10,
            seed_spacing: spacing,
            theta_s: spacing * spacing,
            theta_m: compactness * compactness,
            d_max: T::of(2.0),
            connectivity: Connectivity::Four,
            thicken_radius: 5,
            roi_margin: T::of(2.0) * spacing,
            rng_seed: 0,
        }
    }
}

impl<T: Scalar> RefineConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if !(self.tau_b >= T::zero()
            && self.tau_b < self.tau0
            && self.tau0 < self.tau_f
            && self.tau_f <= T::one())
        {
            return bad("thresholds must satisfy 0 <= tau_b < tau0 < tau_f <= 1");
        }
        if self.n_s == 0 {
            return bad("n_s must be at least 1");
        }
        if !(self.seed_spacing >= T::one()) {
            return bad("seed_spacing must be at least 1");
        }
        if !(self.theta_s > T::zero() && self.theta_m > T::zero()) {
            return bad("theta_s and theta_m must be positive");
        }
        if !(self.d_max > T::zero()) {
            return bad("d_max must be positive");
        }
        if !(self.roi_margin >= T::zero()) {
            return bad("roi_margin must be non-negative");
        }
        Ok(())
    }

    /// Sets the spacing and the spatial normalizer together.
    pub fn with_seed_spacing(mut self, spacing: T) -> Self {
        self.seed_spacing = spacing;
        self.theta_s = spacing * spacing;
        self
    }

    /// Sets the color normalizer from a SLIC-style compactness value.
    pub fn with_compactness(mut self, compactness: T) -> Self {
        self.theta_m = compactness * compactness;
        self
    }
}
