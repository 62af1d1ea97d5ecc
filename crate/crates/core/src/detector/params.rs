use serde::{Deserialize, Serialize};

use crate::contours::Connectivity;
use crate::error::{Error, Result};
use crate::geometry::{Point2, RotatedRect};
use crate::image::Kernel;

/// Manually configured slot geometry: the first slot's box, centered at
/// `(origin_x, origin_y)`. Further slots repeat every `width` pixels to the
/// right.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManualBox {
    pub width: f64,
    pub height: f64,
    #[serde(default)]
    pub angle_deg: f64,
    pub origin_x: f64,
    pub origin_y: f64,
}

impl ManualBox {
    pub fn rect_at(&self, k: usize) -> RotatedRect {
        RotatedRect {
            center: Point2::new(self.origin_x + k as f64 * self.width, self.origin_y),
            width: self.width,
            height: self.height,
            angle_deg: self.angle_deg,
        }
    }
}

impl Default for ManualBox {
    fn default() -> Self {
        Self {
            width: 240.0,
            height: 180.0,
            angle_deg: 0.0,
            origin_x: 120.0,
            origin_y: 150.0,
        }
    }
}

/// Orientation of the two-cell structuring element.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelOrientation {
    /// One row, two columns.
    #[default]
    Horizontal,
    /// Two rows, one column.
    Vertical,
}

impl KernelOrientation {
    pub fn kernel(self) -> Kernel {
        match self {
            KernelOrientation::Horizontal => Kernel::ones(1, 2),
            KernelOrientation::Vertical => Kernel::ones(2, 1),
        }
        .expect("non-empty kernel")
    }
}

/// Every tunable of the detection pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorParams {
    pub slot_count: usize,
    /// Working resolution every input is resampled to.
    pub resize_width: usize,
    pub resize_height: usize,
    pub truncate_threshold: u8,
    pub erode_iterations: usize,
    pub dilate_iterations: usize,
    pub kernel_orientation: KernelOrientation,
    pub connectivity: Connectivity,
    /// Contours with a smaller filled area are noise.
    pub min_area: usize,
    /// Contours whose top row lies below this are noise.
    pub y_limit: usize,
    /// Contours with an ellipse angle strictly between these are noise.
    pub noise_angle_lo: f64,
    pub noise_angle_hi: f64,
    pub module1_min_contours: usize,
    pub occupancy_count_threshold: usize,
    /// Rows below the lowest contour are cropped only when it ends above
    /// this row. `None` means three quarters of the image height.
    pub crop_limit: Option<usize>,
    pub crop_margin: usize,
    pub manual_box: ManualBox,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            slot_count: 4,
            resize_width: 960,
            resize_height: 540,
            truncate_threshold: 127,
            erode_iterations: 1,
            dilate_iterations: 2,
            kernel_orientation: KernelOrientation::Horizontal,
            connectivity: Connectivity::Eight,
            min_area: 70,
            y_limit: 270,
            noise_angle_lo: 80.0,
            noise_angle_hi: 100.0,
            module1_min_contours: 5,
            occupancy_count_threshold: 1,
            crop_limit: None,
            crop_margin: 10,
            manual_box: ManualBox::default(),
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if self.slot_count == 0 {
            return bad("slot_count must be at least 1");
        }
        if self.resize_width == 0 || self.resize_height == 0 {
            return bad("resize target must be positive");
        }
        if !(0.0 <= self.noise_angle_lo
            && self.noise_angle_lo < self.noise_angle_hi
            && self.noise_angle_hi <= 180.0)
        {
            return bad("noise angles must satisfy 0 <= lo < hi <= 180");
        }
        let m = &self.manual_box;
        if !(m.width > 0.0 && m.height > 0.0) || ![m.angle_deg, m.origin_x, m.origin_y].iter().all(|v| v.is_finite()) {
            return bad("manual box must have positive, finite dimensions");
        }
        Ok(())
    }

    pub fn crop_limit_for(&self, height: usize) -> usize {
        self.crop_limit.unwrap_or(height * 3 / 4)
    }
}
