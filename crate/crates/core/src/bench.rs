//! Synthetic desk-scale benchmark.
//!
//! Scenes are flat-colored shapes on a softly textured background with pixel
//! noise. Detector output is imitated by shifting, blurring and perturbing
//! the ground-truth indicator, which yields the blobby, misaligned masks
//! refinement is meant to repair. Each scene is then segmented by plain
//! thresholding at `tau0`, by the superpixel-voting baseline, and by RGR.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::baseline::{sppx_refine, SppxParams};
use crate::color::{delta_e, srgb_to_lab};
use crate::error::{Error, Result};
use crate::metrics::{boundary_f, default_boundary_tolerance, iou};
use crate::model::{ConfidenceMap, ImageSize, RefineConfig, RgbImage, SegMask};
use crate::refine::rgr_refine;
use crate::rng::{self, StreamRng};
use crate::scalar::Scalar;

/// Minimum CIELAB distance between any foreground and any background color.
pub const MIN_POOL_SEPARATION: f64 = 25.0;
/// Per-channel pixel noise, 8-bit units.
pub const PIXEL_NOISE_SIGMA: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneStyle {
    Ellipse,
    Polygon,
    MultiBlob,
}

impl SceneStyle {
    pub const ALL: [SceneStyle; 3] = [SceneStyle::Ellipse, SceneStyle::Polygon, SceneStyle::MultiBlob];
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// Rotated ellipse; `angle` in radians.
    Ellipse {
        cx: f64,
        cy: f64,
        rx: f64,
        ry: f64,
        angle: f64,
    },
    Polygon {
        vertices: Vec<(f64, f64)>,
    },
}

impl Shape {
    /// Whether the pixel center `(x, y)` lies inside the shape.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Shape::Ellipse {
                cx,
                cy,
                rx,
                ry,
                angle,
            } => {
                let (s, c) = angle.sin_cos();
                let (dx, dy) = (x - cx, y - cy);
                let u = (dx * c + dy * s) / rx;
                let v = (-dx * s + dy * c) / ry;
                u * u + v * v <= 1.0
            }
            Shape::Polygon { vertices } => {
                let mut inside = false;
                let n = vertices.len();
                for i in 0..n {
                    let (xi, yi) = vertices[i];
                    let (xj, yj) = vertices[(i + n - 1) % n];
                    if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                        inside = !inside;
                    }
                }
                inside
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scene<T> {
    pub image: RgbImage,
    pub gt: SegMask<T>,
    pub shapes: Vec<Shape>,
    pub style: SceneStyle,
    pub fg_pool: Vec<[u8; 3]>,
    pub bg_pool: Vec<[u8; 3]>,
}

fn random_color(rng: &mut StreamRng) -> [u8; 3] {
    [0; 3].map(|_| rng.random_range(20..=235u8))
}

fn jitter(base: [u8; 3], rng: &mut StreamRng) -> [u8; 3] {
    base.map(|c| (i16::from(c) + rng.random_range(-12..=12i16)).clamp(0, 255) as u8)
}

fn lerp_rgb(a: [u8; 3], b: [u8; 3], t: f64) -> [f64; 3] {
    [0, 1, 2].map(|i| f64::from(a[i]) * (1.0 - t) + f64::from(b[i]) * t)
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Draws foreground and background pools until every foreground color is at
/// least [`MIN_POOL_SEPARATION`] away from every background color, including
/// the blends the background texture produces.
fn color_pools(rng: &mut StreamRng) -> (Vec<[u8; 3]>, Vec<[u8; 3]>) {
    loop {
        let fb = random_color(rng);
        let bb = random_color(rng);
        let fg = vec![jitter(fb, rng), jitter(fb, rng)];
        let bg = vec![jitter(bb, rng), jitter(bb, rng)];
        let separated = fg.iter().all(|&f| {
            let fl = srgb_to_lab(f);
            (0..=8).all(|s| {
                let mix = lerp_rgb(bg[0], bg[1], s as f64 / 8.0).map(to_u8);
                delta_e(fl, srgb_to_lab(mix)) >= MIN_POOL_SEPARATION
            })
        });
        if separated {
            return (fg, bg);
        }
    }
}

fn ellipse_shape(size: ImageSize, rng: &mut StreamRng) -> Shape {
    let (w, h) = (size.width() as f64, size.height() as f64);
    Shape::Ellipse {
        cx: rng.random_range(0.4..0.6) * w,
        cy: rng.random_range(0.4..0.6) * h,
        rx: rng.random_range(0.15..0.3) * w.min(h),
        ry: rng.random_range(0.15..0.3) * w.min(h),
        angle: rng.random_range(0.0..PI),
    }
}

fn polygon_shape(size: ImageSize, rng: &mut StreamRng) -> Shape {
    let (w, h) = (size.width() as f64, size.height() as f64);
    let cx = rng.random_range(0.4..0.6) * w;
    let cy = rng.random_range(0.4..0.6) * h;
    let reach = 0.33 * w.min(h);
    let n = rng.random_range(5..=8usize);
    let phase = rng.random_range(0.0..2.0 * PI);
    let vertices = (0..n)
        .map(|i| {
            let a = phase + (i as f64 + rng.random_range(-0.3..0.3)) * 2.0 * PI / n as f64;
            let r = reach * rng.random_range(0.5..1.0);
            (cx + r * a.cos(), cy + r * a.sin())
        })
        .collect();
    Shape::Polygon { vertices }
}

fn blob_shapes(size: ImageSize, rng: &mut StreamRng) -> Vec<Shape> {
    let (w, h) = (size.width() as f64, size.height() as f64);
    let m = w.min(h);
    let mut scale = 1.0;
    loop {
        for _ in 0..500 {
            let mut disks: Vec<(f64, f64, f64)> = Vec::with_capacity(3);
            for _ in 0..3 {
                let r = rng.random_range(0.08..0.16) * m * scale;
                let cx = rng.random_range(r + 2.0..w - r - 2.0);
                let cy = rng.random_range(r + 2.0..h - r - 2.0);
                // A 3 px gap keeps the blobs apart under 8-connectivity.
                if disks
                    .iter()
                    .all(|&(x, y, q)| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() > r + q + 3.0)
                {
                    disks.push((cx, cy, r));
                }
            }
            if disks.len() == 3 {
                return disks
                    .into_iter()
                    .map(|(cx, cy, r)| Shape::Ellipse {
                        cx,
                        cy,
                        rx: r,
                        ry: r,
                        angle: 0.0,
                    })
                    .collect();
            }
        }
        scale *= 0.8;
    }
}

/// Renders a scene and its exact ground-truth mask. Needs at least 32x32.
pub fn gen_scene<T: Scalar>(size: ImageSize, seed: u64, style: SceneStyle) -> Result<Scene<T>> {
    if size.width() < 32 || size.height() < 32 {
        return Err(Error::InvalidConfig(format!(
            "scenes need at least 32x32 pixels, got {size}"
        )));
    }
    let mut rng = rng::stream(seed, 0);
    let (fg_pool, bg_pool) = color_pools(&mut rng);
    let shapes = match style {
        SceneStyle::Ellipse => vec![ellipse_shape(size, &mut rng)],
        SceneStyle::Polygon => vec![polygon_shape(size, &mut rng)],
        SceneStyle::MultiBlob => blob_shapes(size, &mut rng),
    };

    // Low-frequency background texture: a smooth blend between the two
    // background colors.
    let (fx, fy) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
    let (px, py) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
    let (w, h) = (size.width() as f64, size.height() as f64);

    let noise = Normal::new(0.0, PIXEL_NOISE_SIGMA).expect("valid sigma");
    let mut labels = vec![false; size.len()];
    let mut pixels = Vec::with_capacity(size.len());
    for (i, label) in labels.iter_mut().enumerate() {
        let (x, y) = size.coords(i);
        let (xf, yf) = (x as f64, y as f64);
        let hit = shapes.iter().position(|s| s.contains(xf, yf));
        let base = match hit {
            Some(k) => {
                *label = true;
                fg_pool[k % fg_pool.len()].map(f64::from)
            }
            None => {
                let t = 0.5
                    + 0.25 * (2.0 * PI * fx * xf / w + px).sin()
                    + 0.25 * (2.0 * PI * fy * yf / h + py).sin();
                lerp_rgb(bg_pool[0], bg_pool[1], t)
            }
        };
        pixels.push(base.map(|c| to_u8(c + noise.sample(&mut rng))));
    }
    Ok(Scene {
        image: RgbImage::new(size, pixels)?,
        gt: SegMask::from_labels(size, labels)?,
        shapes,
        style,
        fg_pool,
        bg_pool,
    })
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

fn blur_axis(src: &[f64], size: ImageSize, kernel: &[f64], horizontal: bool) -> Vec<f64> {
    let (w, h) = (size.width() as isize, size.height() as isize);
    let r = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; src.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (j, &kv) in kernel.iter().enumerate() {
                let o = j as isize - r;
                let (sx, sy) = if horizontal {
                    ((x + o).clamp(0, w - 1), y)
                } else {
                    (x, (y + o).clamp(0, h - 1))
                };
                acc += kv * src[(sy * w + sx) as usize];
            }
            out[(y * w + x) as usize] = acc;
        }
    }
    out
}

/// Imitates a coarse detector: the ground-truth indicator shifted by `shift`
/// (edges replicated), blurred with a Gaussian truncated at 3 sigma, plus
/// i.i.d. Gaussian noise, clamped into `[0, 1]`.
pub fn degrade<T: Scalar>(
    gt: &SegMask<T>,
    blur_sigma: f64,
    shift: (i32, i32),
    noise_sigma: f64,
    seed: u64,
) -> Result<ConfidenceMap<T>> {
    if !(blur_sigma >= 0.0) || !(noise_sigma >= 0.0) {
        return Err(Error::InvalidConfig(
            "blur and noise sigmas must be non-negative".into(),
        ));
    }
    let size = gt.size();
    let (w, h) = (size.width() as i64, size.height() as i64);
    let mut field: Vec<f64> = (0..size.len())
        .map(|i| {
            let (x, y) = size.coords(i);
            let sx = (x as i64 - i64::from(shift.0)).clamp(0, w - 1);
            let sy = (y as i64 - i64::from(shift.1)).clamp(0, h - 1);
            if gt.labels()[(sy * w + sx) as usize] {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    if blur_sigma > 0.0 {
        let k = gaussian_kernel(blur_sigma);
        field = blur_axis(&field, size, &k, true);
        field = blur_axis(&field, size, &k, false);
    }
    if noise_sigma > 0.0 {
        let mut rng = rng::stream(seed, 0);
        let noise = Normal::new(0.0, noise_sigma).expect("valid sigma");
        field.iter_mut().for_each(|v| *v += noise.sample(&mut rng));
    }
    let scores = field.into_iter().map(|v| T::of(v.clamp(0.0, 1.0))).collect();
    ConfidenceMap::new(size, scores)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegradeParams {
    pub blur_sigma: f64,
    /// Shifts are drawn uniformly from `[-max_shift, max_shift]` per axis.
    pub max_shift: i32,
    pub noise_sigma: f64,
}

impl Default for DegradeParams {
    fn default() -> Self {
        Self {
            blur_sigma: 8.0,
            max_shift: 4,
            noise_sigma: 0.05,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BenchParams {
    pub size: ImageSize,
    pub degrade: DegradeParams,
    /// Boundary matching tolerance; `None` uses 0.8% of the diagonal.
    pub boundary_tol: Option<f64>,
}

impl Default for BenchParams {
    fn default() -> Self {
        Self {
            size: ImageSize::new(320, 240).expect("non-zero"),
            degrade: DegradeParams::default(),
            boundary_tol: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Threshold,
    Sppx,
    Rgr,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Threshold, Method::Sppx, Method::Rgr];

    pub fn name(self) -> &'static str {
        match self {
            Method::Threshold => "threshold",
            Method::Sppx => "sppx",
            Method::Rgr => "rgr",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: Method,
    pub scene_id: usize,
    pub style: SceneStyle,
    pub shift: (i32, i32),
    pub iou: f64,
    pub boundary_f: f64,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub scenes: usize,
    pub mean_iou: f64,
    pub mean_boundary_f: f64,
    pub mean_runtime_ms: f64,
    pub max_runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<MethodSummary>,
}

impl BenchReport {
    pub fn summary_for(&self, method: Method) -> &MethodSummary {
        self.summary
            .iter()
            .find(|s| s.method == method)
            .expect("every method is summarized")
    }

    /// `method,scene_id,iou,boundary_f,runtime_ms`, one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,scene_id,iou,boundary_f,runtime_ms\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{:.3}",
                r.method.name(),
                r.scene_id,
                r.iou,
                r.boundary_f,
                r.runtime_ms
            );
        }
        out
    }

    /// Rows as a JSON array.
    pub fn rows_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.rows).expect("rows serialize")
    }

    /// Copy with timings zeroed, for comparing runs.
    pub fn without_timing(&self) -> BenchReport {
        let mut r = self.clone();
        r.rows.iter_mut().for_each(|row| row.runtime_ms = 0.0);
        r.summary.iter_mut().for_each(|s| {
            s.mean_runtime_ms = 0.0;
            s.max_runtime_ms = 0.0;
        });
        r
    }
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, f64) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed().as_secs_f64() * 1e3)
}

fn threshold_mask<T: Scalar>(m: &ConfidenceMap<T>, tau0: T) -> Result<SegMask<T>> {
    SegMask::from_labels(m.size(), m.scores().iter().map(|&s| s > tau0).collect())
}

fn run_scene<T: Scalar>(
    id: usize,
    cfg: &RefineConfig<T>,
    params: &BenchParams,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    let style = SceneStyle::ALL[id % SceneStyle::ALL.len()];
    let base = 3 * id as u64;
    let scene = gen_scene::<T>(params.size, rng::derive_seed(seed, base), style)?;
    let d = params.degrade;
    let mut shift_rng = rng::stream(seed, base + 2);
    let shift = (
        shift_rng.random_range(-d.max_shift..=d.max_shift),
        shift_rng.random_range(-d.max_shift..=d.max_shift),
    );
    let m = degrade(
        &scene.gt,
        d.blur_sigma,
        shift,
        d.noise_sigma,
        rng::derive_seed(seed, base + 1),
    )?;
    let tol = params
        .boundary_tol
        .unwrap_or_else(|| default_boundary_tolerance(params.size));
    let sppx = SppxParams::matching(cfg, params.size);

    Method::ALL
        .iter()
        .map(|&method| {
            let (mask, runtime_ms) = timed(|| match method {
                Method::Threshold => threshold_mask(&m, cfg.tau0),
                Method::Sppx => sppx_refine(&scene.image, &m, &sppx),
                Method::Rgr => rgr_refine(&scene.image, &m, cfg),
            });
            let mask = mask?;
            Ok(BenchRow {
                method,
                scene_id: id,
                style,
                shift,
                iou: iou(&mask, &scene.gt)?,
                boundary_f: boundary_f(&mask, &scene.gt, tol)?.f,
                runtime_ms,
            })
        })
        .collect()
}

/// Runs all three methods on `n_scenes` generated scenes. Scene `i` uses
/// style `i mod 3` and random streams derived from `(seed, i)`, so metric
/// values are reproducible regardless of thread count; only timings vary.
pub fn run_benchmark<T: Scalar>(
    n_scenes: usize,
    cfg: &RefineConfig<T>,
    params: &BenchParams,
    seed: u64,
) -> Result<BenchReport> {
    if n_scenes == 0 {
        return Err(Error::InvalidConfig("n_scenes must be at least 1".into()));
    }
    cfg.validate()?;
    let per_scene: Vec<Vec<BenchRow>> = (0..n_scenes)
        .into_par_iter()
        .map(|i| run_scene(i, cfg, params, seed))
        .collect::<Result<_>>()?;
    let rows: Vec<BenchRow> = per_scene.into_iter().flatten().collect();

    let summary = Method::ALL
        .iter()
        .map(|&method| {
            let mine: Vec<&BenchRow> = rows.iter().filter(|r| r.method == method).collect();
            let n = mine.len() as f64;
            MethodSummary {
                method,
                scenes: mine.len(),
                mean_iou: mine.iter().map(|r| r.iou).sum::<f64>() / n,
                mean_boundary_f: mine.iter().map(|r| r.boundary_f).sum::<f64>() / n,
                mean_runtime_ms: mine.iter().map(|r| r.runtime_ms).sum::<f64>() / n,
                max_runtime_ms: mine.iter().map(|r| r.runtime_ms).fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(BenchReport { rows, summary })
}
