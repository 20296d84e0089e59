//! sRGB to CIELAB conversion (D65 white, 2 degree observer).

use crate::model::{LabImage, RgbImage};
use crate::scalar::Scalar;

// Linear sRGB -> XYZ, D65.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

/// Decodes one 8-bit sRGB channel to linear light.
pub fn srgb_to_linear(v: u8) -> f64 {
    let c = f64::from(v) / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

fn linear_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let mut xyz = [0.0; 3];
    for (out, row) in xyz.iter_mut().zip(RGB_TO_XYZ.iter()) {
        *out = row[0] * rgb[0] + row[1] * rgb[1] + row[2] * rgb[2];
    }
    // White is the image of linear (1, 1, 1), so sRGB white lands on a = b = 0.
    let white = RGB_TO_XYZ.map(|row| row[0] + row[1] + row[2]);
    let fx = lab_f(xyz[0] / white[0]);
    let fy = lab_f(xyz[1] / white[1]);
    let fz = lab_f(xyz[2] / white[2]);
    let l = (116.0 * fy - 16.0).clamp(0.0, 100.0);
    [l, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Converts a single 8-bit sRGB triple to `[l, a, b]`.
pub fn srgb_to_lab(rgb: [u8; 3]) -> [f64; 3] {
    linear_to_lab(rgb.map(srgb_to_linear))
}

pub fn rgb_to_lab<T: Scalar>(img: &RgbImage) -> LabImage<T> {
    let lut: Vec<f64> = (0..=255u8).map(srgb_to_linear).collect();
    let pixels = img
        .pixels()
        .iter()
        .map(|px| {
            let lin = px.map(|c| lut[c as usize]);
            linear_to_lab(lin).map(T::of)
        })
        .collect();
    LabImage::new(img.size(), pixels).expect("lab conversion keeps L in range")
}

/// Euclidean distance between two Lab colors.
pub fn delta_e(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}
