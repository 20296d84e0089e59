//! Mask quality measures: region IoU (Jaccard), contour F-measure, and a
//! threshold sweep over soft score maps.
//!
//! Every metric is total. Empty-set conventions:
//! - IoU of two empty masks is 1.
//! - Boundary F of two masks without boundary pixels is 1; if only one side
//!   has boundary pixels it is 0.
//! - Precision of an empty prediction is 1; recall against an empty ground
//!   truth is 1.

use serde::Serialize;

use crate::distance::squared_edt;
use crate::error::{Error, Result};
use crate::model::{ImageSize, SegMask};
use crate::scalar::Scalar;

fn check<T: Scalar>(a: &SegMask<T>, b: &SegMask<T>) -> Result<()> {
    a.size().ensure_same(b.size())
}

pub fn iou<T: Scalar>(a: &SegMask<T>, b: &SegMask<T>) -> Result<f64> {
    check(a, b)?;
    let (inter, union) = overlap(a.labels(), b.labels());
    Ok(ratio_or_one(inter, union))
}

fn overlap(a: &[bool], b: &[bool]) -> (usize, usize) {
    a.iter().zip(b).fold((0, 0), |(i, u), (&p, &q)| {
        (i + usize::from(p && q), u + usize::from(p || q))
    })
}

fn ratio_or_one(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryScore {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

/// Foreground pixels with a background 4-neighbor or lying on the image border.
pub fn boundary_pixels(size: ImageSize, labels: &[bool]) -> Vec<bool> {
    let (w, h) = (size.width(), size.height());
    (0..size.len())
        .map(|i| {
            if !labels[i] {
                return false;
            }
            let (x, y) = size.coords(i);
            x == 0
                || y == 0
                || x == w - 1
                || y == h - 1
                || !labels[i - 1]
                || !labels[i + 1]
                || !labels[i - w]
                || !labels[i + w]
        })
        .collect()
}

/// Default matching tolerance: 0.8% of the image diagonal, rounded up.
pub fn default_boundary_tolerance(size: ImageSize) -> f64 {
    (0.008 * size.diagonal()).ceil()
}

/// Contour precision, recall and F-measure with matching tolerance `tol`
/// (Euclidean, pixels).
pub fn boundary_f<T: Scalar>(pred: &SegMask<T>, gt: &SegMask<T>, tol: f64) -> Result<BoundaryScore> {
    check(pred, gt)?;
    if !(tol >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "boundary tolerance must be >= 0, got {tol}"
        )));
    }
    let size = pred.size();
    let pb = boundary_pixels(size, pred.labels());
    let gb = boundary_pixels(size, gt.labels());
    let n_pred = pb.iter().filter(|&&b| b).count();
    let n_gt = gb.iter().filter(|&&b| b).count();

    if n_pred == 0 && n_gt == 0 {
        return Ok(BoundaryScore {
            precision: 1.0,
            recall: 1.0,
            f: 1.0,
        });
    }
    let limit = tol * tol;
    let matched = |from: &[bool], to: &[bool]| -> usize {
        if !to.iter().any(|&b| b) {
            return 0;
        }
        let d2 = squared_edt(size, to);
        from.iter().zip(d2).filter(|(&b, d)| b && *d <= limit).count()
    };
    let precision = if n_pred == 0 {
        0.0
    } else {
        matched(&pb, &gb) as f64 / n_pred as f64
    };
    let recall = if n_gt == 0 {
        0.0
    } else {
        matched(&gb, &pb) as f64 / n_gt as f64
    };
    let f = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(BoundaryScore { precision, recall, f })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub iou: f64,
}

/// Binarizes `scores` at `> t` for every threshold and scores the result
/// against `gt` pixel-wise.
pub fn pr_sweep<T: Scalar>(scores: &[T], gt: &SegMask<T>, thresholds: &[f64]) -> Result<Vec<PrPoint>> {
    if scores.len() != gt.size().len() {
        return Err(Error::LengthMismatch {
            expected: gt.size().len(),
            actual: scores.len(),
        });
    }
    if thresholds.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidConfig("thresholds must be sorted ascending".into()));
    }
    let n_gt = gt.labels().iter().filter(|&&g| g).count();
    Ok(thresholds
        .iter()
        .map(|&t| {
            let pred: Vec<bool> = scores.iter().map(|s| s.as_f64() > t).collect();
            let n_pred = pred.iter().filter(|&&p| p).count();
            let (tp, union) = overlap(&pred, gt.labels());
            PrPoint {
                threshold: t,
                precision: ratio_or_one(tp, n_pred),
                recall: ratio_or_one(tp, n_gt),
                iou: ratio_or_one(tp, union),
            }
        })
        .collect())
}
