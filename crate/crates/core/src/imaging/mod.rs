//! Pixel-level primitives: color conversion, resampling, smoothing,
//! thresholding, edge detection and binary morphology.
//!
//! Every function here is pure and allocation-returning; inputs are never
//! mutated.

mod canny;
mod color;
mod filter;
mod morphology;
mod resize;

pub use canny::{canny, sobel_gradients, CannyThresholds, Gradients};
pub use color::to_grayscale;
pub use filter::{gaussian_1d, gaussian_blur_3x3, truncate_threshold, GAUSSIAN_3X3};
pub use morphology::{close, dilate, erode, open};
pub use resize::{resize_gray, resize_rgb};

/// Round half up, then clamp into the 8-bit range.
#[inline]
pub(crate) fn round_clamp(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}
