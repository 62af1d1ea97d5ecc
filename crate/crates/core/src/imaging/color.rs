use crate::image::{GrayImage, RgbImage};

/// BT.601 luma: `round(0.299 r + 0.587 g + 0.114 b)`.
///
/// Computed in integer thousandths so the half-up rounding is exact.
pub fn to_grayscale(img: &RgbImage) -> GrayImage {
    let data = img
        .as_raw()
        .chunks_exact(3)
        .map(|px| {
            let sum = 299 * px[0] as u32 + 587 * px[1] as u32 + 114 * px[2] as u32;
            ((sum + 500) / 1000).min(255) as u8
        })
        .collect();
    GrayImage::from_raw(img.width(), img.height(), data).expect("same dimensions")
}
