use crate::error::{Error, Result};
use crate::image::GrayImage;

/// The 3×3 binomial Gaussian kernel, scaled by 16.
pub const GAUSSIAN_3X3: [[u32; 3]; 3] = [[1, 2, 1], [2, 4, 2], [1, 2, 1]];

/// Convolves with `GAUSSIAN_3X3 / 16` using replicate-border padding.
///
/// The weighted sum is an integer, so half-up rounding is `(sum + 8) / 16`.
pub fn gaussian_blur_3x3(img: &GrayImage) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut sum = 0u32;
            for (ky, row) in GAUSSIAN_3X3.iter().enumerate() {
                for (kx, &k) in row.iter().enumerate() {
                    sum += k * img.get_clamped(x + kx as isize - 1, y + ky as isize - 1) as u32;
                }
            }
            data.push(((sum + 8) / 16) as u8);
        }
    }
    GrayImage::from_raw(w, h, data).expect("same dimensions")
}

/// Zero-mean normal density `exp(-x²/2σ²) / (√(2π) σ)`.
pub fn gaussian_1d(x: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidSigma(sigma));
    }
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma);
    Ok(norm * (-(x * x) / (2.0 * sigma * sigma)).exp())
}

/// Truncate thresholding: values above `t` become `t`, the rest pass through.
pub fn truncate_threshold(img: &GrayImage, t: u8) -> GrayImage {
    let data = img
        .as_raw()
        .iter()
        .map(|&v| if v > t { t } else { v })
        .collect();
    GrayImage::from_raw(img.width(), img.height(), data).expect("same dimensions")
}
