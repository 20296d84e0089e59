use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{LabImage, RegionLabel, RegionPartition, Seed, SeedOrigin};
use crate::scalar::Scalar;

/// Number of seeds for a sampling domain of `region_area` pixels at the given
/// average spacing: `max(1, round(area / spacing^2))`.
pub fn seed_count<T: Scalar>(region_area: usize, spacing: T) -> usize {
    let area = T::of_usize(region_area);
    let k = (area / (spacing * spacing)).round();
    k.to_usize().unwrap_or(usize::MAX).max(1)
}

/// Draws `min(k, |domain|)` distinct seeds uniformly from the confident
/// pixels of a post-RoI partition (foreground and near background).
///
/// Seeds come back in raster order, each carrying its pixel's Lab color.
pub fn sample_seeds<T: Scalar, R: Rng + ?Sized>(
    p: &RegionPartition,
    lab: &LabImage<T>,
    k: usize,
    rng: &mut R,
) -> Result<Vec<Seed<T>>> {
    p.size().ensure_same(lab.size())?;
    let domain: Vec<usize> = p
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_seedable())
        .map(|(i, _)| i)
        .collect();
    if domain.is_empty() {
        return Err(Error::NoHighConfidenceRegion);
    }
    let amount = k.min(domain.len());
    let mut picked: Vec<usize> = index::sample(rng, domain.len(), amount)
        .into_iter()
        .map(|h| domain[h])
        .collect();
    picked.sort_unstable();

    let size = p.size();
    Ok(picked
        .into_iter()
        .map(|i| {
            let (x, y) = size.coords(i);
            let origin = match p.labels()[i] {
                RegionLabel::Foreground => SeedOrigin::Foreground,
                _ => SeedOrigin::Background,
            };
            Seed {
                x,
                y,
                color: lab.pixels()[i],
                origin,
            }
        })
        .collect())
}
