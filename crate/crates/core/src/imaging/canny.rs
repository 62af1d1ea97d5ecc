//! Canny edge detection: Sobel gradients, non-maximum suppression along a
//! four-bin gradient direction, and double-threshold hysteresis.
//!
//! Gradient magnitude is the L2 norm of the raw 3×3 Sobel responses. The
//! thresholds are compared against that value directly, which is the usual
//! convention for the common `50 / 150` defaults.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage};

const TAN_22_5: f64 = 0.414_213_562_373_095_1;
const TAN_67_5: f64 = 2.414_213_562_373_095;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CannyThresholds {
    pub low: f64,
    pub high: f64,
}

impl CannyThresholds {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(0.0..=255.0).contains(&low) || !(0.0..=255.0).contains(&high) || low > high {
            return Err(Error::InvalidThresholds { low, high });
        }
        Ok(Self { low, high })
    }
}

impl Default for CannyThresholds {
    fn default() -> Self {
        Self {
            low: 50.0,
            high: 150.0,
        }
    }
}

/// Per-pixel Sobel responses.
#[derive(Clone, Debug)]
pub struct Gradients {
    pub width: usize,
    pub height: usize,
    pub gx: Vec<i32>,
    pub gy: Vec<i32>,
}

impl Gradients {
    #[inline]
    pub fn magnitude(&self, i: usize) -> f64 {
        let (gx, gy) = (self.gx[i] as f64, self.gy[i] as f64);
        (gx * gx + gy * gy).sqrt()
    }
}

/// 3×3 Sobel derivatives with replicate-border padding.
pub fn sobel_gradients(img: &GrayImage) -> Gradients {
    let (w, h) = (img.width(), img.height());
    let mut gx = Vec::with_capacity(w * h);
    let mut gy = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let p = |dx: isize, dy: isize| img.get_clamped(x + dx, y + dy) as i32;
            gx.push(
                p(1, -1) + 2 * p(1, 0) + p(1, 1) - p(-1, -1) - 2 * p(-1, 0) - p(-1, 1),
            );
            gy.push(
                p(-1, 1) + 2 * p(0, 1) + p(1, 1) - p(-1, -1) - 2 * p(0, -1) - p(1, -1),
            );
        }
    }
    Gradients {
        width: w,
        height: h,
        gx,
        gy,
    }
}

pub fn canny(img: &GrayImage, low: f64, high: f64) -> Result<BinaryImage> {
    let t = CannyThresholds::new(low, high)?;
    let grad = sobel_gradients(img);
    let (w, h) = (grad.width, grad.height);
    let mag: Vec<f64> = (0..w * h).map(|i| grad.magnitude(i)).collect();
    let at = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            mag[y as usize * w + x as usize]
        }
    };

    // 0 = suppressed, 1 = weak, 2 = strong
    let mut class = vec![0u8; w * h];
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = mag[i];
            if m <= t.low {
                continue;
            }
            let (xi, yi) = (x as isize, y as isize);
            let (gx, gy) = (grad.gx[i] as f64, grad.gy[i] as f64);
            let (ax, ay) = (gx.abs(), gy.abs());
            // Ties resolve toward the earlier (left / upper) pixel.
            let is_max = if ay <= ax * TAN_22_5 {
                m > at(xi - 1, yi) && m >= at(xi + 1, yi)
            } else if ay > ax * TAN_67_5 {
                m > at(xi, yi - 1) && m >= at(xi, yi + 1)
            } else if (gx > 0.0) == (gy > 0.0) {
                m > at(xi - 1, yi - 1) && m > at(xi + 1, yi + 1)
            } else {
                m > at(xi + 1, yi - 1) && m > at(xi - 1, yi + 1)
            };
            if !is_max {
                continue;
            }
            if m > t.high {
                class[i] = 2;
                queue.push_back(i);
            } else {
                class[i] = 1;
            }
        }
    }

    // Hysteresis: promote weak pixels 8-connected to a strong one.
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if class[j] == 1 {
                    class[j] = 2;
                    queue.push_back(j);
                }
            }
        }
    }

    let data = class.into_iter().map(|c| (c == 2) as u8).collect();
    BinaryImage::from_raw(w, h, data)
}
