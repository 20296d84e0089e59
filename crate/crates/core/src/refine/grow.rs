use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::model::{ClusterMap, ClusterMeta, LabImage, RefineConfig, RegionPartition, Seed};
use crate::scalar::Scalar;

/// Joint spatial/color distance between a pixel and a centroid, both given as
/// `[x, y, l, a, b]`.
#[inline]
pub fn snic_distance<T: Scalar>(px: [T; 5], centroid: [T; 5], theta_s: T, theta_m: T) -> T {
    let sq = |i: usize| {
        let d = px[i] - centroid[i];
        d * d
    };
    let spatial = sq(0) + sq(1);
    let color = sq(2) + sq(3) + sq(4);
    (spatial / theta_s + color / theta_m).sqrt()
}

/// Queue element: a candidate pixel for a cluster, keyed by its distance at
/// push time. Ties are broken by insertion order.
#[derive(Clone, Copy, Debug)]
pub struct GrowNode<T> {
    pub pixel: usize,
    pub cluster: u32,
    pub distance: T,
    pub tiebreak: u64,
}

impl<T: Scalar> PartialEq for GrowNode<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for GrowNode<T> {}

impl<T: Scalar> PartialOrd for GrowNode<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for GrowNode<T> {
    // Reversed so that `BinaryHeap` pops the smallest (distance, tiebreak).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .distance
            .partial_cmp(&self.distance)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.tiebreak.cmp(&self.tiebreak))
    }
}

struct Grower<'a, T> {
    lab: &'a LabImage<T>,
    roi: &'a RegionPartition,
    cfg: &'a RefineConfig<T>,
    assignment: Vec<Option<u32>>,
    sums: Vec<[T; 5]>,
    meta: Vec<ClusterMeta>,
    heap: BinaryHeap<GrowNode<T>>,
    counter: u64,
}

impl<T: Scalar> Grower<'_, T> {
    fn features(&self, pixel: usize) -> [T; 5] {
        let (x, y) = self.roi.size().coords(pixel);
        let [l, a, b] = self.lab.pixels()[pixel];
        [T::of_usize(x), T::of_usize(y), l, a, b]
    }

    fn annex(&mut self, pixel: usize, cluster: u32) {
        let f = self.features(pixel);
        self.assignment[pixel] = Some(cluster);
        let k = cluster as usize;
        for (s, v) in self.sums[k].iter_mut().zip(f) {
            *s = *s + v;
        }
        self.meta[k].pixel_count += 1;
    }

    fn push_neighbors(&mut self, pixel: usize, cluster: u32) {
        let k = cluster as usize;
        let n = T::of_usize(self.meta[k].pixel_count);
        let centroid = self.sums[k].map(|s| s / n);
        let size = self.roi.size();
        let (x, y) = size.coords(pixel);
        for &(dx, dy) in self.cfg.connectivity.offsets() {
            let (Some(nx), Some(ny)) = (x.checked_add_signed(dx), y.checked_add_signed(dy)) else {
                continue;
            };
            if nx >= size.width() || ny >= size.height() {
                continue;
            }
            let q = ny * size.width() + nx;
            if self.assignment[q].is_some() || !self.roi.labels()[q].in_roi() {
                continue;
            }
            let d = snic_distance(self.features(q), centroid, self.cfg.theta_s, self.cfg.theta_m);
            if d < self.cfg.d_max {
                self.heap.push(GrowNode {
                    pixel: q,
                    cluster,
                    distance: d,
                    tiebreak: self.counter,
                });
                self.counter += 1;
            }
        }
    }
}

/// Grows one cluster per seed over the RoI of `roi`.
///
/// All seed pixels are annexed first, in seed order; then the neighbors of
/// each seed are queued, again in seed order. From there on the closest
/// queued node is popped repeatedly; if its pixel is still free it joins the
/// node's cluster, the cluster's running mean centroid is updated, and the
/// free RoI neighbors closer than `cfg.d_max` to that centroid are queued.
/// Nodes whose pixel was taken in the meantime are dropped. Pixels never
/// annexed, including everything outside the RoI, stay orphans.
pub fn grow_regions<T: Scalar>(
    lab: &LabImage<T>,
    roi: &RegionPartition,
    seeds: &[Seed<T>],
    cfg: &RefineConfig<T>,
) -> Result<ClusterMap> {
    let size = roi.size();
    size.ensure_same(lab.size())?;
    if seeds.is_empty() {
        return Err(Error::NoHighConfidenceRegion);
    }

    let mut g = Grower {
        lab,
        roi,
        cfg,
        assignment: vec![None; size.len()],
        sums: vec![[T::zero(); 5]; seeds.len()],
        meta: seeds
            .iter()
            .map(|s| ClusterMeta {
                origin: s.origin,
                pixel_count: 0,
            })
            .collect(),
        heap: BinaryHeap::new(),
        counter: 0,
    };

    let mut seed_pixels = Vec::with_capacity(seeds.len());
    for (k, s) in seeds.iter().enumerate() {
        let invalid = |reason| Error::InvalidSeed {
            x: s.x,
            y: s.y,
            reason,
        };
        let i = size.index(s.x, s.y).map_err(|_| invalid("outside the image"))?;
        if !roi.labels()[i].in_roi() {
            return Err(invalid("outside the region of interest"));
        }
        if g.assignment[i].is_some() {
            return Err(invalid("duplicate seed position"));
        }
        g.annex(i, k as u32);
        seed_pixels.push(i);
    }
    for (k, &i) in seed_pixels.iter().enumerate() {
        g.push_neighbors(i, k as u32);
    }

    while let Some(node) = g.heap.pop() {
        if g.assignment[node.pixel].is_some() {
            continue;
        }
        g.annex(node.pixel, node.cluster);
        g.push_neighbors(node.pixel, node.cluster);
    }

    Ok(ClusterMap::from_parts(size, g.assignment, g.meta))
}
