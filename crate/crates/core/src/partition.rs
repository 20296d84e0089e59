//! Splitting a confidence map into confident and uncertain regions, and
//! carving the region of interest out of the background.

use crate::distance::{chebyshev_within, squared_edt};
use crate::model::{ConfidenceMap, RefineConfig, RegionLabel, RegionPartition};
use crate::scalar::Scalar;

/// Tri-region split. Scores equal to `tau_f` count as foreground and scores
/// equal to `tau_b` as background, so every pixel receives a label.
pub fn threshold_regions<T: Scalar>(m: &ConfidenceMap<T>, cfg: &RefineConfig<T>) -> RegionPartition {
    let labels = m
        .scores()
        .iter()
        .map(|&s| {
            if s >= cfg.tau_f {
                RegionLabel::Foreground
            } else if s <= cfg.tau_b {
                RegionLabel::Background
            } else {
                RegionLabel::Uncertain
            }
        })
        .collect();
    RegionPartition::new(m.size(), labels).expect("labels match map size")
}

/// Relabels as uncertain every background pixel within Chebyshev distance
/// `radius` of an uncertain or foreground pixel.
pub fn thicken_uncertain(p: &RegionPartition, radius: usize) -> RegionPartition {
    if radius == 0 {
        return p.clone();
    }
    let sources: Vec<bool> = p
        .labels()
        .iter()
        .map(|&l| matches!(l, RegionLabel::Uncertain | RegionLabel::Foreground))
        .collect();
    let near = chebyshev_within(p.size(), &sources, radius);
    let labels = p
        .labels()
        .iter()
        .zip(near)
        .map(|(&l, near)| match l {
            RegionLabel::Background if near => RegionLabel::Uncertain,
            other => other,
        })
        .collect();
    RegionPartition::new(p.size(), labels).expect("same size")
}

/// Marks background pixels within Euclidean distance `margin` of the
/// uncertain set as near background. What stays `Background` is the far
/// background, excluded from growing.
pub fn compute_roi<T: Scalar>(p: &RegionPartition, margin: T) -> RegionPartition {
    let uncertain = p.mask_of(RegionLabel::Uncertain);
    let margin = margin.as_f64();
    if margin <= 0.0 || !uncertain.iter().any(|&u| u) {
        return p.clone();
    }
    let sq = squared_edt(p.size(), &uncertain);
    let limit = margin * margin;
    let labels = p
        .labels()
        .iter()
        .zip(sq)
        .map(|(&l, d2)| match l {
            RegionLabel::Background if d2 <= limit => RegionLabel::NearBackground,
            other => other,
        })
        .collect();
    RegionPartition::new(p.size(), labels).expect("same size")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ImageSize;
    use proptest::prelude::*;
    use RegionLabel::*;

    fn cfg(tau_b: f64, tau_f: f64) -> RefineConfig<f64> {
        RefineConfig {
            tau_b,
            tau_f,
            tau0: (tau_b + tau_f) / 2.0,
            ..Default::default()
        }
    }

    #[test]
    fn threshold_example() {
        let size = ImageSize::new(2, 2).unwrap();
        let m = ConfidenceMap::new(size, vec![0.0, 0.3, 0.7, 1.0]).unwrap();
        let p = threshold_regions(&m, &cfg(0.0, 0.6));
        assert_eq!(p.labels(), &[Background, Uncertain, Foreground, Foreground]);
    }

    #[test]
    fn threshold_boundary_equalities_go_to_confident_classes() {
        let size = ImageSize::new(3, 1).unwrap();
        let m = ConfidenceMap::new(size, vec![0.1, 0.6, 0.35]).unwrap();
        let p = threshold_regions(&m, &cfg(0.1, 0.6));
        assert_eq!(p.labels(), &[Background, Foreground, Uncertain]);
    }

    #[test]
    fn threshold_constant_maps() {
        let size = ImageSize::new(5, 4).unwrap();
        let c = RefineConfig::default();
        let ones = ConfidenceMap::filled(size, 1.0).unwrap();
        assert_eq!(threshold_regions(&ones, &c).count(Foreground), 20);
        let zeros = ConfidenceMap::filled(size, 0.0).unwrap();
        assert_eq!(threshold_regions(&zeros, &c).count(Background), 20);
    }

    #[test]
    fn thicken_strip_example() {
        // Oracle: a background pixel flips iff some U/F pixel is within 1 column.
        let size = ImageSize::new(5, 1).unwrap();
        let p = RegionPartition::new(
            size,
            vec![Background, Background, Background, Uncertain, Foreground],
        )
        .unwrap();
        let t = thicken_uncertain(&p, 1);
        assert_eq!(
            t.labels(),
            &[Background, Background, Uncertain, Uncertain, Foreground]
        );
        assert_eq!(thicken_uncertain(&p, 0), p);
    }

    #[test]
    fn thicken_all_background_is_identity() {
        let p = RegionPartition::filled(ImageSize::new(6, 6).unwrap(), Background);
        assert_eq!(thicken_uncertain(&p, 3), p);
    }

    #[test]
    fn roi_without_uncertain_pixels() {
        let size = ImageSize::new(4, 4).unwrap();
        let mut labels = vec![Background; 16];
        labels[5] = Foreground;
        let p = RegionPartition::new(size, labels).unwrap();
        assert_eq!(compute_roi(&p, 5.0), p);
    }

    #[test]
    fn roi_disk_around_single_uncertain_pixel() {
        let size = ImageSize::new(7, 7).unwrap();
        let mut labels = vec![Background; 49];
        labels[3 * 7 + 3] = Uncertain;
        let p = RegionPartition::new(size, labels).unwrap();
        let roi = compute_roi(&p, 2.0);
        for i in 0..49 {
            let (x, y) = size.coords(i);
            let d2 = (x as i64 - 3).pow(2) + (y as i64 - 3).pow(2);
            let want = if d2 == 0 {
                Uncertain
            } else if d2 <= 4 {
                NearBackground
            } else {
                Background
            };
            assert_eq!(roi.labels()[i], want, "pixel ({x},{y})");
        }
        assert_eq!(roi.count(NearBackground), 12);
        assert_eq!(compute_roi(&p, 0.0).count(NearBackground), 0);
    }

    fn label_strategy() -> impl Strategy<Value = RegionLabel> {
        prop_oneof![4 => Just(Background), 1 => Just(Uncertain), 1 => Just(Foreground)]
    }

    proptest! {
        #[test]
        fn partition_covers_grid(w in 1usize..20, h in 1usize..20, scores in proptest::collection::vec(0.0f64..=1.0, 400)) {
            let size = ImageSize::new(w, h).unwrap();
            let m = ConfidenceMap::new(size, scores[..w * h].to_vec()).unwrap();
            let p = threshold_regions(&m, &RefineConfig::default());
            prop_assert_eq!(p.count(Foreground) + p.count(Uncertain) + p.count(Background), w * h);
        }

        #[test]
        fn thickening_is_monotone(labels in proptest::collection::vec(label_strategy(), 100), r in 0usize..6) {
            let p = RegionPartition::new(ImageSize::new(10, 10).unwrap(), labels).unwrap();
            let a = thicken_uncertain(&p, r);
            let b = thicken_uncertain(&p, r + 1);
            for i in 0..100 {
                if a.labels()[i] == Uncertain { prop_assert_eq!(b.labels()[i], Uncertain); }
                if p.labels()[i] == Foreground { prop_assert_eq!(a.labels()[i], Foreground); }
                if a.labels()[i] == Background { prop_assert_eq!(p.labels()[i], Background); }
            }
        }

        #[test]
        fn roi_splits_background_exactly(labels in proptest::collection::vec(label_strategy(), 100), margin in 0.0f64..6.0) {
            let p = RegionPartition::new(ImageSize::new(10, 10).unwrap(), labels).unwrap();
            let roi = compute_roi(&p, margin);
            for i in 0..100 {
                let was_bg = p.labels()[i] == Background;
                let now_bg = matches!(roi.labels()[i], Background | NearBackground);
                prop_assert_eq!(was_bg, now_bg);
                if !was_bg { prop_assert_eq!(p.labels()[i], roi.labels()[i]); }
            }
        }
    }
}
