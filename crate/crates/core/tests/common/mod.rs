//! Test-only oracles and instance generators shared by the integration suites.
#![allow(dead_code)]

use rand::Rng;
use rgr::rng::StreamRng;
use rgr::{
    ClusterMap, Connectivity, ImageSize, LabImage, RefineConfig, RegionLabel, RegionPartition, RgbImage,
    Seed, SeedOrigin,
};

/// Replays greedy capped growth with a flat candidate list and a linear scan
/// for the minimum `(distance, insertion)` pair instead of a heap.
pub fn brute_force_grow(
    lab: &LabImage<f64>,
    roi: &RegionPartition,
    seeds: &[Seed<f64>],
    cfg: &RefineConfig<f64>,
) -> Vec<Option<u32>> {
    let size = roi.size();
    let (w, h) = (size.width() as i64, size.height() as i64);
    let feat = |i: usize| -> [f64; 5] {
        let [l, a, b] = lab.pixels()[i];
        [(i % size.width()) as f64, (i / size.width()) as f64, l, a, b]
    };
    let mut owner: Vec<Option<u32>> = vec![None; size.len()];
    let mut sums = vec![[0.0f64; 5]; seeds.len()];
    let mut counts = vec![0usize; seeds.len()];
    // (pixel, cluster, distance, insertion)
    let mut pending: Vec<(usize, u32, f64, u64)> = Vec::new();
    let mut next = 0u64;

    let annex = |p: usize,
                 k: u32,
                 owner: &mut Vec<Option<u32>>,
                 sums: &mut Vec<[f64; 5]>,
                 counts: &mut Vec<usize>| {
        owner[p] = Some(k);
        let f = feat(p);
        for c in 0..5 {
            sums[k as usize][c] += f[c];
        }
        counts[k as usize] += 1;
    };
    let offsets: &[(i64, i64)] = match cfg.connectivity {
        Connectivity::Four => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
        Connectivity::Eight => &[
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ],
    };
    let expand = |p: usize,
                  k: u32,
                  owner: &Vec<Option<u32>>,
                  sums: &Vec<[f64; 5]>,
                  counts: &Vec<usize>,
                  pending: &mut Vec<(usize, u32, f64, u64)>,
                  next: &mut u64| {
        let n = counts[k as usize] as f64;
        let c: Vec<f64> = sums[k as usize].iter().map(|s| s / n).collect();
        let (x, y) = ((p % size.width()) as i64, (p / size.width()) as i64);
        for &(dx, dy) in offsets {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w || ny >= h {
                continue;
            }
            let q = (ny * w + nx) as usize;
            if owner[q].is_some() || roi.labels()[q] == RegionLabel::Background {
                continue;
            }
            let f = feat(q);
            let spatial = (f[0] - c[0]) * (f[0] - c[0]) + (f[1] - c[1]) * (f[1] - c[1]);
            let color =
                (f[2] - c[2]) * (f[2] - c[2]) + (f[3] - c[3]) * (f[3] - c[3]) + (f[4] - c[4]) * (f[4] - c[4]);
            let d = (spatial / cfg.theta_s + color / cfg.theta_m).sqrt();
            if d < cfg.d_max {
                pending.push((q, k, d, *next));
                *next += 1;
            }
        }
    };

    let seed_px: Vec<usize> = seeds.iter().map(|s| s.y * size.width() + s.x).collect();
    for (k, &p) in seed_px.iter().enumerate() {
        annex(p, k as u32, &mut owner, &mut sums, &mut counts);
    }
    for (k, &p) in seed_px.iter().enumerate() {
        expand(p, k as u32, &owner, &sums, &counts, &mut pending, &mut next);
    }
    while !pending.is_empty() {
        let mut best = 0;
        for i in 1..pending.len() {
            let (a, b) = (pending[i], pending[best]);
            if a.2 < b.2 || (a.2 == b.2 && a.3 < b.3) {
                best = i;
            }
        }
        let (p, k, _, _) = pending.swap_remove(best);
        if owner[p].is_some() {
            continue;
        }
        annex(p, k, &mut owner, &mut sums, &mut counts);
        expand(p, k, &owner, &sums, &counts, &mut pending, &mut next);
    }
    owner
}

/// Checks the bookkeeping invariants of a cluster map.
pub fn check_cluster_map(map: &ClusterMap, roi: &RegionPartition) {
    let mut counts = vec![0usize; map.clusters().len()];
    for (i, a) in map.assignment().iter().enumerate() {
        if let Some(k) = a {
            assert!((*k as usize) < counts.len());
            counts[*k as usize] += 1;
        }
        if !roi.labels()[i].in_roi() {
            assert!(a.is_none(), "pixel {i} outside the RoI was assigned");
        }
    }
    for (meta, n) in map.clusters().iter().zip(counts) {
        assert_eq!(meta.pixel_count, n);
        assert!(n >= 1);
    }
}

/// A random small growth problem: palette-colored image (so distance ties
/// occur), random partition, and seeds drawn from the RoI.
pub struct Instance {
    pub lab: LabImage<f64>,
    pub roi: RegionPartition,
    pub seeds: Vec<Seed<f64>>,
    pub cfg: RefineConfig<f64>,
}

pub fn random_instance(rng: &mut StreamRng, w: usize, h: usize) -> Instance {
    let size = ImageSize::new(w, h).unwrap();
    let palette: Vec<[u8; 3]> = (0..rng.random_range(2..6))
        .map(|_| [rng.random(), rng.random(), rng.random()])
        .collect();
    let img = RgbImage::from_fn(size, |_, _| palette[rng.random_range(0..palette.len())]);
    let lab = rgb_to_lab_f64(&img);
    let labels = (0..size.len())
        .map(|_| match rng.random_range(0..10) {
            0 => RegionLabel::Background,
            1..=3 => RegionLabel::Foreground,
            4..=5 => RegionLabel::NearBackground,
            _ => RegionLabel::Uncertain,
        })
        .collect();
    let roi = RegionPartition::new(size, labels).unwrap();
    let eligible: Vec<usize> = (0..size.len()).filter(|&i| roi.labels()[i].in_roi()).collect();
    let k = rng.random_range(1..=6.min(eligible.len()));
    let picks = rand::seq::index::sample(rng, eligible.len(), k);
    let seeds = picks
        .into_iter()
        .map(|j| {
            let i = eligible[j];
            Seed {
                x: i % w,
                y: i / w,
                color: lab.pixels()[i],
                origin: if roi.labels()[i] == RegionLabel::Foreground {
                    SeedOrigin::Foreground
                } else {
                    SeedOrigin::Background
                },
            }
        })
        .collect();
    let spacing: f64 = rng.random_range(1.0..6.0);
    let cfg = RefineConfig {
        d_max: rng.random_range(0.3..6.0),
        connectivity: if rng.random_bool(0.5) {
            Connectivity::Four
        } else {
            Connectivity::Eight
        },
        ..RefineConfig::default()
    }
    .with_seed_spacing(spacing)
    .with_compactness(rng.random_range(2.0..30.0));
    Instance { lab, roi, seeds, cfg }
}

pub fn rgb_to_lab_f64(img: &RgbImage) -> LabImage<f64> {
    rgr::rgb_to_lab(img)
}
