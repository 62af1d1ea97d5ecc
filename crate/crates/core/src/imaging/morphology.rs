//! Binary erosion and dilation with arbitrary flat structuring elements.
//!
//! Pixels outside the image are background for both operations.

use crate::error::{Error, Result};
use crate::image::{BinaryImage, Kernel};

/// Output is set iff every set kernel cell, placed at the anchor, lands on
/// foreground ("fits").
pub fn erode(img: &BinaryImage, kernel: &Kernel, iterations: usize) -> Result<BinaryImage> {
    let offsets = binary_offsets(kernel)?;
    let mut cur = img.clone();
    for _ in 0..iterations {
        cur = BinaryImage::from_fn(img.width(), img.height(), |x, y| {
            offsets
                .iter()
                .all(|&(dx, dy)| cur.get_or_zero(x as isize + dx, y as isize + dy))
        })?;
    }
    Ok(cur)
}

/// Output is set iff any set cell of the reflected kernel overlaps
/// foreground ("hits").
pub fn dilate(img: &BinaryImage, kernel: &Kernel, iterations: usize) -> Result<BinaryImage> {
    let offsets = binary_offsets(kernel)?;
    let mut cur = img.clone();
    for _ in 0..iterations {
        cur = BinaryImage::from_fn(img.width(), img.height(), |x, y| {
            offsets
                .iter()
                .any(|&(dx, dy)| cur.get_or_zero(x as isize - dx, y as isize - dy))
        })?;
    }
    Ok(cur)
}

/// Erosion followed by dilation.
pub fn open(img: &BinaryImage, kernel: &Kernel) -> Result<BinaryImage> {
    dilate(&erode(img, kernel, 1)?, kernel, 1)
}

/// Dilation followed by erosion, computed as the complement of opening the
/// complement with the reflected kernel. Inside the image this is the usual
/// closing; at the border the erosion step sees the outside as foreground,
/// so the result always contains `img`.
pub fn close(img: &BinaryImage, kernel: &Kernel) -> Result<BinaryImage> {
    Ok(open(&img.invert(), &kernel.reflect())?.invert())
}

fn binary_offsets(kernel: &Kernel) -> Result<Vec<(isize, isize)>> {
    if !kernel.is_binary() {
        return Err(Error::NonBinaryKernel);
    }
    Ok(kernel.active_offsets())
}
