//! Naive reference implementations used as test oracles. Each one is written
//! from the definition, independently of the library code it checks.
#![allow(dead_code)]

use parkscan_core::{BinaryImage, GrayImage, Kernel};
use rand::Rng;

pub fn random_gray(rng: &mut impl Rng, max_side: usize) -> GrayImage {
    let (w, h) = (rng.gen_range(1..=max_side), rng.gen_range(1..=max_side));
    let data = (0..w * h).map(|_| rng.gen()).collect();
    GrayImage::from_raw(w, h, data).unwrap()
}

pub fn random_binary(rng: &mut impl Rng, max_side: usize) -> BinaryImage {
    let (w, h) = (rng.gen_range(1..=max_side), rng.gen_range(1..=max_side));
    let density: f64 = rng.gen_range(0.05..0.95);
    let data = (0..w * h).map(|_| rng.gen_bool(density) as u8).collect();
    BinaryImage::from_raw(w, h, data).unwrap()
}

/// Random binary kernel of up to 3×3 with at least one set cell and a random
/// anchor.
pub fn random_kernel(rng: &mut impl Rng) -> Kernel {
    let (rows, cols) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    let mut weights: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(0..2) as f64).collect();
    let i = rng.gen_range(0..weights.len());
    weights[i] = 1.0;
    Kernel::new(rows, cols, weights)
        .unwrap()
        .with_anchor(rng.gen_range(0..rows), rng.gen_range(0..cols))
        .unwrap()
}

/// 3×3 binomial blur with replicated borders and round-half-up.
pub fn blur(img: &GrayImage) -> GrayImage {
    let k = [[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 2.0, 1.0]];
    let (w, h) = (img.width() as i64, img.height() as i64);
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let mut acc = 0.0;
        for (j, row) in k.iter().enumerate() {
            for (i, wt) in row.iter().enumerate() {
                let sx = (x as i64 + i as i64 - 1).clamp(0, w - 1) as usize;
                let sy = (y as i64 + j as i64 - 1).clamp(0, h - 1) as usize;
                acc += wt * img.get(sx, sy) as f64;
            }
        }
        (acc / 16.0 + 0.5).floor().clamp(0.0, 255.0) as u8
    })
    .unwrap()
}

pub fn truncate(img: &GrayImage, t: u8) -> GrayImage {
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let v = img.get(x, y);
        if v > t {
            t
        } else {
            v
        }
    })
    .unwrap()
}

/// Set cells of `k` as `(row, col)` pairs.
fn cells(k: &Kernel) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..k.rows() {
        for c in 0..k.cols() {
            if k.weight(r, c) == 1.0 {
                out.push((r, c));
            }
        }
    }
    out
}

/// Erosion as "the kernel, anchored at p, fits inside the foreground".
pub fn erode(img: &BinaryImage, k: &Kernel) -> BinaryImage {
    let (ar, ac) = k.anchor();
    let cells = cells(k);
    let mut out = BinaryImage::new(img.width(), img.height()).unwrap();
    for y in 0..img.height() {
        for x in 0..img.width() {
            let mut fits = true;
            for &(r, c) in &cells {
                let sx = x as i64 + c as i64 - ac as i64;
                let sy = y as i64 + r as i64 - ar as i64;
                let inside = sx >= 0 && sy >= 0 && (sx as usize) < img.width() && (sy as usize) < img.height();
                if !inside || !img.get(sx as usize, sy as usize) {
                    fits = false;
                }
            }
            out.set(x, y, fits);
        }
    }
    out
}

/// Dilation as the union of the kernel stamped at every foreground pixel.
pub fn dilate(img: &BinaryImage, k: &Kernel) -> BinaryImage {
    let (ar, ac) = k.anchor();
    let cells = cells(k);
    let mut out = BinaryImage::new(img.width(), img.height()).unwrap();
    for y in 0..img.height() {
        for x in 0..img.width() {
            if !img.get(x, y) {
                continue;
            }
            for &(r, c) in &cells {
                let tx = x as i64 + c as i64 - ac as i64;
                let ty = y as i64 + r as i64 - ar as i64;
                if tx >= 0 && ty >= 0 && (tx as usize) < img.width() && (ty as usize) < img.height() {
                    out.set(tx as usize, ty as usize, true);
                }
            }
        }
    }
    out
}

pub fn repeat(img: &BinaryImage, n: usize, f: impl Fn(&BinaryImage) -> BinaryImage) -> BinaryImage {
    (0..n).fold(img.clone(), |acc, _| f(&acc))
}

/// Two-pass union-find labeling. Returns components as sorted pixel lists,
/// themselves sorted.
pub fn label(img: &BinaryImage, eight: bool) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = (img.width(), img.height());
    let mut parent: Vec<usize> = (0..w * h).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut back: Vec<(i64, i64)> = vec![(-1, 0), (0, -1)];
    if eight {
        back.extend([(-1, -1), (1, -1)]);
    }
    for y in 0..h {
        for x in 0..w {
            if !img.get(x, y) {
                continue;
            }
            for &(dx, dy) in &back {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx < 0 || ny < 0 || nx as usize >= w {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if img.get(nx, ny) {
                    let a = find(&mut parent, y * w + x);
                    let b = find(&mut parent, ny * w + nx);
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups = std::collections::BTreeMap::<usize, Vec<(usize, usize)>>::new();
    for y in 0..h {
        for x in 0..w {
            if img.get(x, y) {
                let root = find(&mut parent, y * w + x);
                groups.entry(root).or_default().push((x, y));
            }
        }
    }
    let mut comps: Vec<Vec<(usize, usize)>> = groups
        .into_values()
        .map(|mut v| {
            v.sort();
            v
        })
        .collect();
    comps.sort();
    comps
}

/// Components found by the library, in the same normalized form.
pub fn library_components(img: &BinaryImage, eight: bool) -> Vec<Vec<(usize, usize)>> {
    use parkscan_core::{find_external_contours, Connectivity};
    let conn = if eight { Connectivity::Eight } else { Connectivity::Four };
    let mut comps: Vec<Vec<(usize, usize)>> = find_external_contours(img, conn)
        .iter()
        .map(|c| {
            let mut v = c.pixels.clone();
            v.sort();
            v
        })
        .collect();
    comps.sort();
    comps
}

/// Canny by definition: Sobel with replicated borders, non-maximum
/// suppression along the atan2 direction quantized to 45°, then hysteresis
/// iterated to a fixpoint. Ties keep the later neighbor for the axis
/// directions and are suppressed on diagonals.
pub fn canny(img: &GrayImage, low: f64, high: f64) -> BinaryImage {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let px = |x: i64, y: i64| img.get(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize) as f64;
    let sx = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
    let mut gx = vec![0.0; (w * h) as usize];
    let mut gy = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let (mut ax, mut ay) = (0.0, 0.0);
            for j in 0..3 {
                for i in 0..3 {
                    let v = px(x + i as i64 - 1, y + j as i64 - 1);
                    ax += sx[j][i] * v;
                    ay += sx[i][j] * v;
                }
            }
            gx[(y * w + x) as usize] = ax;
            gy[(y * w + x) as usize] = ay;
        }
    }
    let mag = |x: i64, y: i64| -> f64 {
        if x < 0 || y < 0 || x >= w || y >= h {
            return 0.0;
        }
        let i = (y * w + x) as usize;
        gx[i].hypot(gy[i])
    };
    let mut state = vec![0u8; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            let m = mag(x, y);
            if m <= low {
                continue;
            }
            let deg = gy[i].atan2(gx[i]).to_degrees().rem_euclid(180.0);
            let keep = if !(22.5..157.5).contains(&deg) {
                m > mag(x - 1, y) && m >= mag(x + 1, y)
            } else if deg < 67.5 {
                m > mag(x - 1, y - 1) && m > mag(x + 1, y + 1)
            } else if deg <= 112.5 {
                m > mag(x, y - 1) && m >= mag(x, y + 1)
            } else {
                m > mag(x + 1, y - 1) && m > mag(x - 1, y + 1)
            };
            if keep {
                state[i] = if m > high { 2 } else { 1 };
            }
        }
    }
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                let i = (y * w + x) as usize;
                if state[i] != 1 {
                    continue;
                }
                let strong_near = (-1..=1).any(|dy| {
                    (-1..=1).any(|dx| {
                        let (nx, ny) = (x + dx, y + dy);
                        nx >= 0 && ny >= 0 && nx < w && ny < h && state[(ny * w + nx) as usize] == 2
                    })
                });
                if strong_near {
                    state[i] = 2;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    BinaryImage::from_raw(img.width(), img.height(), state.iter().map(|&s| (s == 2) as u8).collect()).unwrap()
}
