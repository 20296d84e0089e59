//! Raster distance transforms over boolean source masks.

use crate::model::ImageSize;

/// Exact squared Euclidean distance from every pixel to the nearest `true`
/// pixel of `sources`; `f64::INFINITY` everywhere when there is none.
///
/// Separable lower-envelope algorithm of Felzenszwalb and Huttenlocher, one
/// pass over columns and one over rows.
pub fn squared_edt(size: ImageSize, sources: &[bool]) -> Vec<f64> {
    assert_eq!(sources.len(), size.len());
    let (w, h) = (size.width(), size.height());
    let mut grid: Vec<f64> = sources
        .iter()
        .map(|&s| if s { 0.0 } else { f64::INFINITY })
        .collect();

    let n = w.max(h);
    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];

    for x in 0..w {
        for y in 0..h {
            f[y] = grid[y * w + x];
        }
        edt_1d(&f[..h], &mut d[..h], &mut v, &mut z);
        for y in 0..h {
            grid[y * w + x] = d[y];
        }
    }
    for y in 0..h {
        let row = &mut grid[y * w..(y + 1) * w];
        f[..w].copy_from_slice(row);
        edt_1d(&f[..w], &mut d[..w], &mut v, &mut z);
        row.copy_from_slice(&d[..w]);
    }
    grid
}

fn edt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    // Parabolas rooted at infinite samples never contribute; skip them.
    let mut k: isize = -1;
    for q in 0..n {
        if f[q].is_infinite() {
            continue;
        }
        let qf = q as f64;
        loop {
            if k < 0 {
                k = 0;
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            let p = v[k as usize];
            let pf = p as f64;
            let s = ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * qf - 2.0 * pf);
            if s <= z[k as usize] {
                k -= 1;
                continue;
            }
            k += 1;
            v[k as usize] = q;
            z[k as usize] = s;
            z[k as usize + 1] = f64::INFINITY;
            break;
        }
    }
    if k < 0 {
        d.iter_mut().for_each(|x| *x = f64::INFINITY);
        return;
    }
    let mut j = 0usize;
    for (q, out) in d.iter_mut().enumerate() {
        let qf = q as f64;
        while z[j + 1] < qf {
            j += 1;
        }
        let p = v[j];
        let dq = qf - p as f64;
        *out = dq * dq + f[p];
    }
}

/// Marks every pixel whose Chebyshev distance to some `true` source is at
/// most `radius`. Equivalent to dilation by a `(2r+1)` square.
pub fn chebyshev_within(size: ImageSize, sources: &[bool], radius: usize) -> Vec<bool> {
    assert_eq!(sources.len(), size.len());
    let (w, h) = (size.width(), size.height());
    let mut rows = vec![false; size.len()];
    let mut line = vec![usize::MAX; w.max(h)];

    for y in 0..h {
        nearest_1d((0..w).map(|x| sources[y * w + x]), &mut line[..w]);
        for x in 0..w {
            rows[y * w + x] = line[x] <= radius;
        }
    }
    let mut out = vec![false; size.len()];
    for x in 0..w {
        nearest_1d((0..h).map(|y| rows[y * w + x]), &mut line[..h]);
        for y in 0..h {
            out[y * w + x] = line[y] <= radius;
        }
    }
    out
}

/// Distance along a line to the nearest set entry, `usize::MAX` if none.
fn nearest_1d(set: impl Iterator<Item = bool>, out: &mut [usize]) {
    let mut last: Option<usize> = None;
    for (i, s) in set.enumerate() {
        if s {
            last = Some(i);
        }
        out[i] = last.map_or(usize::MAX, |p| i - p);
    }
    let mut next: Option<usize> = None;
    for i in (0..out.len()).rev() {
        if out[i] == 0 {
            next = Some(i);
        }
        if let Some(p) = next {
            out[i] = out[i].min(p - i);
        }
    }
}
