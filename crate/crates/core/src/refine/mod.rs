//! Monte Carlo seeding, capped region growing, cluster voting, and the full
//! refinement pipeline built from them.

mod grow;
mod seeds;
mod vote;

pub use grow::{grow_regions, snic_distance, GrowNode};
pub use seeds::{sample_seeds, seed_count};
pub use vote::cluster_vote;

use rayon::prelude::*;

use crate::color::rgb_to_lab;
use crate::error::{Error, Result};
use crate::model::{ConfidenceMap, LabImage, RefineConfig, RegionLabel, RegionPartition, RgbImage, SegMask};
use crate::partition::{compute_roi, thicken_uncertain, threshold_regions};
use crate::rng;
use crate::scalar::Scalar;

/// Thresholding, thickening and RoI extraction in one go.
pub fn prepare_partition<T: Scalar>(m: &ConfidenceMap<T>, cfg: &RefineConfig<T>) -> RegionPartition {
    let p = threshold_regions(m, cfg);
    let p = thicken_uncertain(&p, cfg.thicken_radius);
    compute_roi(&p, cfg.roi_margin)
}

/// One seeding, growing and voting round on a prepared partition.
///
/// Returns the per-pixel vote map of this pass.
pub fn refine_pass<T: Scalar>(
    lab: &LabImage<T>,
    m: &ConfidenceMap<T>,
    roi: &RegionPartition,
    cfg: &RefineConfig<T>,
    pass: usize,
) -> Result<Vec<T>> {
    let domain = roi.labels().iter().filter(|l| l.is_seedable()).count();
    if domain == 0 {
        return Err(Error::NoHighConfidenceRegion);
    }
    let k = seed_count(domain, cfg.seed_spacing);
    let mut stream = rng::stream(cfg.rng_seed, pass as u64);
    let seeds = sample_seeds(roi, lab, k, &mut stream)?;
    let clusters = grow_regions(lab, roi, &seeds, cfg)?;
    cluster_vote(&clusters, m, cfg.tau0)
}

/// Refines one detection's confidence map against its image.
///
/// Runs `cfg.n_s` independent passes (in parallel on the current rayon pool),
/// averages their vote maps in pass order, and labels pixels whose average
/// exceeds one half. The result depends only on the inputs and `cfg`, not on
/// the number of worker threads.
pub fn rgr_refine<T: Scalar>(
    img: &RgbImage,
    m: &ConfidenceMap<T>,
    cfg: &RefineConfig<T>,
) -> Result<SegMask<T>> {
    cfg.validate()?;
    img.size().ensure_same(m.size())?;
    let size = m.size();

    let roi = prepare_partition(m, cfg);
    // Without confident foreground nothing can vote positive.
    if roi.count(RegionLabel::Foreground) == 0 {
        return Ok(SegMask::empty(size));
    }
    let lab = rgb_to_lab::<T>(img);

    let passes: Vec<Vec<T>> = (0..cfg.n_s)
        .into_par_iter()
        .map(|i| refine_pass(&lab, m, &roi, cfg, i))
        .collect::<Result<_>>()?;

    let mut sum = vec![T::zero(); size.len()];
    for votes in &passes {
        for (acc, &v) in sum.iter_mut().zip(votes) {
            *acc = *acc + v;
        }
    }
    let n = T::of_usize(cfg.n_s);
    let avg = sum.into_iter().map(|s| (s / n).min(T::one())).collect();
    SegMask::from_votes(size, avg)
}
