//! Raster and report files.
//!
//! - images: PNG (8-bit gray/RGB/RGBA) and binary PPM (`P6`, maxval 255)
//! - confidence maps: grayscale PFM (`Pf`) or 8/16-bit grayscale PNG
//! - masks: 8-bit grayscale PNG, 0 = background, 255 = foreground
//! - score maps: little-endian grayscale PFM
//! - reports: JSON

use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ExtendedColorType, ImageFormat, ImageReader};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ConfidenceMap, ImageSize, RgbImage, SegMask};
use crate::scalar::Scalar;

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Read {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Write {
        path: path.to_owned(),
        source,
    })
}

fn decode_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Decode {
        path: path.to_owned(),
        reason: reason.into(),
    }
}

fn decode_raster(path: &Path, bytes: &[u8]) -> Result<DynamicImage> {
    ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| decode_err(path, e.to_string()))?
        .decode()
        .map_err(|e| decode_err(path, e.to_string()))
}

fn size_of(path: &Path, w: u32, h: u32) -> Result<ImageSize> {
    ImageSize::new(w as usize, h as usize).map_err(|_| decode_err(path, "zero-sized image"))
}

fn is_pfm(bytes: &[u8]) -> bool {
    bytes.starts_with(b"Pf") || bytes.starts_with(b"PF")
}

/// Loads an 8-bit PNG or P6 PPM. Alpha is dropped and gray is replicated.
pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let bytes = read(path)?;
    if is_pfm(&bytes) {
        return Err(Error::UnsupportedDepth {
            path: path.to_owned(),
            detail: "floating-point map given where an 8-bit image is expected".into(),
        });
    }
    let img = decode_raster(path, &bytes)?;
    let size = size_of(path, img.width(), img.height())?;
    let pixels: Vec<[u8; 3]> = match img {
        DynamicImage::ImageRgb8(b) => b.pixels().map(|p| p.0).collect(),
        DynamicImage::ImageRgba8(b) => b.pixels().map(|p| [p[0], p[1], p[2]]).collect(),
        DynamicImage::ImageLuma8(b) => b.pixels().map(|p| [p[0]; 3]).collect(),
        DynamicImage::ImageLumaA8(b) => b.pixels().map(|p| [p[0]; 3]).collect(),
        other => {
            return Err(Error::UnsupportedDepth {
                path: path.to_owned(),
                detail: format!("{:?}", other.color()),
            })
        }
    };
    RgbImage::new(size, pixels)
}

/// A confidence map as loaded from disk.
#[derive(Clone, Debug)]
pub struct LoadedConfidence<T> {
    pub map: ConfidenceMap<T>,
    /// Number of samples that were outside `[0, 1]` (or NaN) and got clamped.
    pub clamped: usize,
}

/// Loads a grayscale PFM or an 8/16-bit grayscale PNG (scaled by 1/255 or
/// 1/65535). Out-of-range samples are clamped and counted.
pub fn load_confidence<T: Scalar>(path: impl AsRef<Path>) -> Result<LoadedConfidence<T>> {
    let path = path.as_ref();
    let bytes = read(path)?;
    let (size, scores): (ImageSize, Vec<T>) = if is_pfm(&bytes) {
        let (size, values) = decode_pfm(&bytes).map_err(|r| decode_err(path, r))?;
        (size, values.into_iter().map(|v| T::of(f64::from(v))).collect())
    } else {
        let img = decode_raster(path, &bytes)?;
        let size = size_of(path, img.width(), img.height())?;
        let scores = match img {
            DynamicImage::ImageLuma16(b) => b.pixels().map(|p| T::of(f64::from(p[0]) / 65535.0)).collect(),
            DynamicImage::ImageLuma8(b) => b.pixels().map(|p| T::of(f64::from(p[0]) / 255.0)).collect(),
            other => {
                return Err(decode_err(
                    path,
                    format!("confidence map must be single-channel, got {:?}", other.color()),
                ))
            }
        };
        (size, scores)
    };
    let (map, clamped) = ConfidenceMap::from_scores_clamped(size, scores)?;
    if clamped > 0 {
        log::warn!("{}: clamped {clamped} scores into [0, 1]", path.display());
    }
    Ok(LoadedConfidence { map, clamped })
}

/// Parses a grayscale PFM into top-down row-major samples.
///
/// The sign of the scale field selects the byte order (negative = little
/// endian); its magnitude is informational and not applied.
pub fn decode_pfm(bytes: &[u8]) -> std::result::Result<(ImageSize, Vec<f32>), String> {
    let mut pos = 0;
    let mut token = || -> std::result::Result<&[u8], String> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated PFM header".into());
        }
        Ok(&bytes[start..pos])
    };
    let parse = |t: &[u8], what: &str| -> std::result::Result<f64, String> {
        std::str::from_utf8(t)
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| format!("bad PFM {what}"))
    };

    match token()? {
        b"Pf" => {}
        b"PF" => return Err("color PFM (PF) is not a confidence map; expected grayscale Pf".into()),
        _ => return Err("missing PFM magic".into()),
    }
    let w = parse(token()?, "width")?;
    let h = parse(token()?, "height")?;
    let scale = parse(token()?, "scale")?;
    if w.fract() != 0.0 || h.fract() != 0.0 || w < 0.0 || h < 0.0 {
        return Err("PFM dimensions must be non-negative integers".into());
    }
    let size = ImageSize::new(w as usize, h as usize).map_err(|e| e.to_string())?;
    if scale == 0.0 || !scale.is_finite() {
        return Err("PFM scale must be non-zero".into());
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err("truncated PFM header".into());
    }
    let data = &bytes[pos + 1..];
    let need = size.len() * 4;
    if data.len() < need {
        return Err(format!(
            "PFM raster truncated: need {need} bytes, have {}",
            data.len()
        ));
    }
    let little = scale < 0.0;
    let (wd, ht) = (size.width(), size.height());
    let mut out = vec![0.0f32; size.len()];
    for (i, chunk) in data[..need].chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        // File rows run bottom to top.
        let (x, fy) = (i % wd, i / wd);
        out[(ht - 1 - fy) * wd + x] = v;
    }
    Ok((size, out))
}

/// Little-endian grayscale PFM of top-down row-major samples.
pub fn encode_pfm(size: ImageSize, values: &[f32]) -> Vec<u8> {
    assert_eq!(values.len(), size.len());
    let (w, h) = (size.width(), size.height());
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(values.len() * 4);
    for y in (0..h).rev() {
        for v in &values[y * w..(y + 1) * w] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

fn save_png(path: &Path, bytes: &[u8], size: ImageSize, color: ExtendedColorType) -> Result<()> {
    let mut buf = Vec::new();
    image::write_buffer_with_format(
        &mut Cursor::new(&mut buf),
        bytes,
        size.width() as u32,
        size.height() as u32,
        color,
        ImageFormat::Png,
    )
    .map_err(|e| Error::Write {
        path: path.to_owned(),
        source: std::io::Error::other(e.to_string()),
    })?;
    write(path, &buf)
}

pub fn save_mask<T: Scalar>(mask: &SegMask<T>, path: impl AsRef<Path>) -> Result<()> {
    let bytes: Vec<u8> = mask.labels().iter().map(|&l| if l { 255 } else { 0 }).collect();
    save_png(path.as_ref(), &bytes, mask.size(), ExtendedColorType::L8)
}

/// Loads a mask PNG; pixels with luma above 127 are foreground.
pub fn load_mask<T: Scalar>(path: impl AsRef<Path>) -> Result<SegMask<T>> {
    let path = path.as_ref();
    let bytes = read(path)?;
    let img = decode_raster(path, &bytes)?;
    let size = size_of(path, img.width(), img.height())?;
    let labels = img.to_luma8().pixels().map(|p| p[0] > 127).collect();
    SegMask::from_labels(size, labels)
}

pub fn save_image(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let bytes: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    save_png(path.as_ref(), &bytes, img.size(), ExtendedColorType::Rgb8)
}

/// Writes a score map as PFM (values narrowed to `f32`).
pub fn save_scores<T: Scalar>(size: ImageSize, scores: &[T], path: impl AsRef<Path>) -> Result<()> {
    if scores.len() != size.len() {
        return Err(Error::LengthMismatch {
            expected: size.len(),
            actual: scores.len(),
        });
    }
    let values: Vec<f32> = scores.iter().map(|s| s.as_f64() as f32).collect();
    write(path.as_ref(), &encode_pfm(size, &values))
}

/// Per-run metrics report. Metric fields are `null` when no ground truth
/// was supplied.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub iou: Option<f64>,
    pub boundary_precision: Option<f64>,
    pub boundary_recall: Option<f64>,
    pub boundary_f: Option<f64>,
    pub config: serde_json::Value,
    pub timing_ms: f64,
}

pub fn save_report(report: &impl Serialize, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_vec_pretty(report).map_err(|e| Error::Write {
        path: PathBuf::from(path),
        source: std::io::Error::other(e),
    })?;
    write(path, &json)
}
