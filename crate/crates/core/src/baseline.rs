//! Superpixel majority-voting baseline: plain SNIC over the whole image,
//! then every superpixel takes the majority of its detector votes.

use crate::color::rgb_to_lab;
use crate::error::{Error, Result};
use crate::model::{
    ConfidenceMap, Connectivity, ImageSize, LabImage, RefineConfig, RegionLabel, RegionPartition, RgbImage,
    Seed, SeedOrigin, SegMask,
};
use crate::refine::{cluster_vote, grow_regions};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct SppxParams<T> {
    /// Requested number of superpixels.
    pub superpixels: usize,
    pub tau0: T,
    pub compactness: T,
    pub connectivity: Connectivity,
}

impl<T: Scalar> SppxParams<T> {
    pub fn new(superpixels: usize, tau0: T) -> Self {
        Self {
            superpixels,
            tau0,
            compactness: T::of(10.0),
            connectivity: Connectivity::Four,
        }
    }

    /// Superpixel count whose mean area matches the RGR seed spacing, with the
    /// same threshold, compactness and connectivity as `cfg`.
    pub fn matching(cfg: &RefineConfig<T>, size: ImageSize) -> Self {
        let area = cfg.seed_spacing * cfg.seed_spacing;
        let k = (T::of_usize(size.len()) / area).round().to_usize().unwrap_or(1);
        Self {
            superpixels: k.clamp(1, size.len()),
            tau0: cfg.tau0,
            compactness: cfg.theta_m.sqrt(),
            connectivity: cfg.connectivity,
        }
    }
}

/// Seeds on a regular grid of roughly `sqrt(w*h/k)` spacing, one per cell,
/// each at its cell center. Never returns more than `k` seeds.
pub fn grid_seeds<T: Scalar>(size: ImageSize, k: usize, lab: &LabImage<T>) -> Result<Vec<Seed<T>>> {
    size.ensure_same(lab.size())?;
    if k == 0 || k > size.len() {
        return Err(Error::InvalidConfig(format!(
            "superpixel count must be in 1..={}, got {k}",
            size.len()
        )));
    }
    let (w, h) = (size.width(), size.height());
    let spacing = ((w * h) as f64 / k as f64).sqrt();
    let nx = ((w as f64 / spacing).floor() as usize).clamp(1, k.min(w));
    let ny = ((h as f64 / spacing).floor() as usize).clamp(1, (k / nx).min(h));
    let cell_w = w as f64 / nx as f64;
    let cell_h = h as f64 / ny as f64;

    let mut seeds = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = (((j as f64 + 0.5) * cell_h) as usize).min(h - 1);
        for i in 0..nx {
            let x = (((i as f64 + 0.5) * cell_w) as usize).min(w - 1);
            seeds.push(Seed {
                x,
                y,
                color: lab.pixels()[y * w + x],
                origin: SeedOrigin::Grid,
            });
        }
    }
    Ok(seeds)
}

/// Baseline refinement. Each superpixel is foreground iff more than half of
/// its pixels score above `tau0`; `avg_votes` holds the per-superpixel ratio.
pub fn sppx_refine<T: Scalar>(
    img: &RgbImage,
    m: &ConfidenceMap<T>,
    params: &SppxParams<T>,
) -> Result<SegMask<T>> {
    img.size().ensure_same(m.size())?;
    let size = m.size();
    let lab = rgb_to_lab::<T>(img);
    let seeds = grid_seeds(size, params.superpixels, &lab)?;

    let spacing = T::of(((size.len()) as f64 / params.superpixels as f64).sqrt());
    let cfg = RefineConfig {
        tau0: params.tau0,
        d_max: T::infinity(),
        connectivity: params.connectivity,
        ..RefineConfig::default()
    }
    .with_seed_spacing(spacing)
    .with_compactness(params.compactness);

    let whole = RegionPartition::filled(size, RegionLabel::Uncertain);
    let clusters = grow_regions(&lab, &whole, &seeds, &cfg)?;
    let votes = cluster_vote(&clusters, m, params.tau0)?;
    SegMask::from_votes(size, votes)
}
