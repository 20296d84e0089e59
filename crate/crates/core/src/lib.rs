//! Refinement of coarse segmentation confidence maps by Monte Carlo seeded
//! region growing (RGR).
//!
//! A detector emits one confidence map per detected object. [`rgr_refine`]
//! splits that map into confident foreground, confident background and an
//! uncertain band, grows clusters from randomly sampled confident pixels over
//! a joint spatial/CIELAB distance, lets every cluster vote with the original
//! scores, and averages the votes of several independent passes into a
//! binary mask that follows the image edges.
//!
//! The crate also carries the superpixel-voting baseline ([`sppx_refine`]),
//! the usual mask metrics, raster IO, and a synthetic benchmark.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the bottom of this file name the common instantiations.
//!
//! ```
//! use rgr::{rgr_refine, ConfidenceMap, ImageSize, RefineConfig, RgbImage};
//!
//! let size = ImageSize::new(16, 16).unwrap();
//! let img = RgbImage::filled(size, [40, 90, 200]);
//! let m = ConfidenceMap::<f64>::filled(size, 1.0).unwrap();
//! let mask = rgr_refine(&img, &m, &RefineConfig::default()).unwrap();
//! assert_eq!(mask.count_foreground(), 256);
//! ```

// `!(x >= lo)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod bench;
pub mod color;
pub mod distance;
mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod partition;
pub mod refine;
pub mod rng;
mod scalar;

pub use baseline::{grid_seeds, sppx_refine, SppxParams};
pub use color::rgb_to_lab;
pub use error::{Error, Result};
pub use metrics::{boundary_f, iou, pr_sweep, BoundaryScore, PrPoint};
pub use model::{
    pixel_index, ClusterMap, ClusterMeta, ConfidenceMap, Connectivity, ImageSize, LabImage, RefineConfig,
    RegionLabel, RegionPartition, RgbImage, Seed, SeedOrigin, SegMask,
};
pub use partition::{compute_roi, thicken_uncertain, threshold_regions};
pub use refine::{cluster_vote, grow_regions, rgr_refine, sample_seeds, seed_count, snic_distance};
pub use scalar::Scalar;

pub type ConfidenceMapF32 = ConfidenceMap<f32>;
pub type ConfidenceMapF64 = ConfidenceMap<f64>;
pub type LabImageF32 = LabImage<f32>;
pub type LabImageF64 = LabImage<f64>;
pub type SegMaskF32 = SegMask<f32>;
pub type SegMaskF64 = SegMask<f64>;
pub type RefineConfigF32 = RefineConfig<f32>;
pub type RefineConfigF64 = RefineConfig<f64>;
pub type SeedF32 = Seed<f32>;
pub type SeedF64 = Seed<f64>;
