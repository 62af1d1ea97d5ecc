use super::round_clamp;
use crate::error::{Error, Result};
use crate::image::{GrayImage, RgbImage};

/// Bilinear resampling with pixel-center alignment.
///
/// Destination pixel `d` samples source coordinate `(d + 0.5) * scale - 0.5`,
/// clamped to the source extent.
pub fn resize_gray(img: &GrayImage, width: usize, height: usize) -> Result<GrayImage> {
    if width == 0 || height == 0 {
        return Err(Error::ZeroDimension);
    }
    if width == img.width() && height == img.height() {
        return Ok(img.clone());
    }
    let xs = sample_positions(img.width(), width);
    let ys = sample_positions(img.height(), height);
    let mut data = Vec::with_capacity(width * height);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let top = img.get(x0, y0) as f64 * (1.0 - fx) + img.get(x1, y0) as f64 * fx;
            let bottom = img.get(x0, y1) as f64 * (1.0 - fx) + img.get(x1, y1) as f64 * fx;
            data.push(round_clamp(top * (1.0 - fy) + bottom * fy));
        }
    }
    GrayImage::from_raw(width, height, data)
}

pub fn resize_rgb(img: &RgbImage, width: usize, height: usize) -> Result<RgbImage> {
    if width == 0 || height == 0 {
        return Err(Error::ZeroDimension);
    }
    if width == img.width() && height == img.height() {
        return Ok(img.clone());
    }
    let [r, g, b] = img.channels();
    RgbImage::from_channels(&[
        resize_gray(&r, width, height)?,
        resize_gray(&g, width, height)?,
        resize_gray(&b, width, height)?,
    ])
}

fn sample_positions(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|d| {
            let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(src - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_resize_is_exact() {
        let img = GrayImage::from_fn(960, 540, |x, y| ((x * 7 + y * 13) % 256) as u8).unwrap();
        assert_eq!(resize_gray(&img, 960, 540).unwrap(), img);
    }

    #[test]
    fn constant_images_stay_constant() {
        let img = GrayImage::filled(2, 2, 100).unwrap();
        for (w, h) in [(1, 1), (3, 5), (17, 4), (64, 64)] {
            let out = resize_gray(&img, w, h).unwrap();
            assert!(out.as_raw().iter().all(|&v| v == 100));
        }
    }

    #[test]
    fn halving_averages_blocks() {
        let img = GrayImage::from_fn(4, 4, |x, y| (x * 10 + y * 40 + (x * y) % 3) as u8).unwrap();
        let out = resize_gray(&img, 2, 2).unwrap();
        for by in 0..2 {
            for bx in 0..2 {
                let sum: u32 = [(0, 0), (1, 0), (0, 1), (1, 1)]
                    .iter()
                    .map(|&(dx, dy)| img.get(bx * 2 + dx, by * 2 + dy) as u32)
                    .sum();
                let expected = ((sum as f64 / 4.0) + 0.5).floor() as u8;
                assert_eq!(out.get(bx, by), expected);
            }
        }
    }

    #[test]
    fn zero_target_rejected() {
        let img = GrayImage::filled(2, 2, 1).unwrap();
        assert_eq!(resize_gray(&img, 0, 2), Err(Error::ZeroDimension));
        let rgb = img.to_rgb();
        assert!(resize_rgb(&rgb, 3, 0).is_err());
    }
}
