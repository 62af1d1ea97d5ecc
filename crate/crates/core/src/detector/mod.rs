//! Slot occupancy detection on top of the imaging and contour stages.
//!
//! Stage order: resize, grayscale, blur, truncate, Canny, erode/dilate,
//! external contours, false-contour removal, module classification,
//! flexible crop, slot box derivation, occupancy judgement, annotation.

mod annotate;
mod params;

use serde::{Deserialize, Serialize};

pub use annotate::{annotate, OCCUPIED_COLOR, STROKE_WIDTH, VACANT_COLOR};
pub use params::{DetectorParams, KernelOrientation, ManualBox};

use crate::contours::{find_external_contours, Contour, ContourSet};
use crate::error::{Error, Result};
use crate::geometry::{min_area_rect_of_pixels, Point2, RotatedRect};
use crate::image::{BinaryImage, GrayImage, RgbImage};
use crate::imaging::{
    canny, dilate, erode, gaussian_blur_3x3, resize_rgb, to_grayscale, truncate_threshold,
    CannyThresholds,
};

/// Detection regime chosen from the number of surviving contours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Module {
    /// Enough contours to derive slot boxes from the cars themselves.
    Module1,
    /// Few or no contours; slot boxes come from the manual geometry.
    Module2,
}

/// Module 1 sub-case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// A car sits in the first slot and seeds the box template.
    FirstSlotOccupied,
    /// First slot empty: manual boxes until a car is met.
    FirstSlotEmpty,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotBox {
    pub index: usize,
    pub center: Point2,
    pub width: f64,
    pub height: f64,
    pub angle_deg: f64,
}

impl SlotBox {
    pub fn from_rect(index: usize, r: RotatedRect) -> Self {
        Self {
            index,
            center: r.center,
            width: r.width,
            height: r.height,
            angle_deg: r.angle_deg,
        }
    }

    pub fn rect(&self) -> RotatedRect {
        RotatedRect {
            center: self.center,
            width: self.width,
            height: self.height,
            angle_deg: self.angle_deg,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub index: usize,
    pub occupied: bool,
    pub slot_box: SlotBox,
    /// Contours whose centroid fell inside the box.
    pub contour_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlotReport {
    pub verdicts: Vec<Verdict>,
    /// One `'0'` (vacant) or `'1'` (occupied) per slot.
    pub bit_string: String,
    pub annotated: RgbImage,
    pub module: Module,
    pub case: Option<Case>,
}

/// Intermediate rasters, in pipeline order.
#[derive(Clone, Debug)]
pub struct Stages {
    pub gray: GrayImage,
    pub blur: GrayImage,
    pub trunc: GrayImage,
    pub canny: BinaryImage,
    pub morph: BinaryImage,
    pub filtered: BinaryImage,
}

impl Stages {
    /// `(suffix, image)` pairs for dumping, numbered in pipeline order.
    pub fn named(&self) -> [(&'static str, GrayImage); 6] {
        [
            ("1gray", self.gray.clone()),
            ("2blur", self.blur.clone()),
            ("3trunc", self.trunc.clone()),
            ("4canny", self.canny.to_gray()),
            ("5morph", self.morph.to_gray()),
            ("6filtered", self.filtered.to_gray()),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct Detection {
    pub report: SlotReport,
    pub stages: Stages,
    pub contours: ContourSet,
}

/// Drops every contour that is too small, starts below `y_limit`, or is
/// oriented strictly between the noise angles, and zeroes its pixels in the
/// returned mask.
pub fn remove_false_contours(
    cs: &ContourSet,
    mask: &BinaryImage,
    p: &DetectorParams,
) -> Result<(ContourSet, BinaryImage)> {
    if mask.width() != cs.width || mask.height() != cs.height {
        return Err(Error::DimensionMismatch);
    }
    let mut scrubbed = mask.clone();
    let mut kept = Vec::with_capacity(cs.len());
    for c in cs.iter() {
        if is_false_contour(c, p) {
            for &(x, y) in &c.pixels {
                scrubbed.set(x, y, false);
            }
        } else {
            kept.push(c.clone());
        }
    }
    Ok((
        ContourSet {
            contours: kept,
            width: cs.width,
            height: cs.height,
        },
        scrubbed,
    ))
}

pub fn is_false_contour(c: &Contour, p: &DetectorParams) -> bool {
    c.area < p.min_area
        || c.top() > p.y_limit
        || (c.ellipse_angle > p.noise_angle_lo && c.ellipse_angle < p.noise_angle_hi)
}

pub fn classify_module(cs: &ContourSet, p: &DetectorParams) -> Module {
    if cs.len() >= p.module1_min_contours {
        Module::Module1
    } else {
        Module::Module2
    }
}

/// Images that can lose their bottom rows.
pub trait CropRows: Sized {
    fn rows(&self) -> usize;
    fn keep_rows(&self, rows: usize) -> Self;
}

impl CropRows for GrayImage {
    fn rows(&self) -> usize {
        self.height()
    }
    fn keep_rows(&self, rows: usize) -> Self {
        self.crop_rows(rows).expect("rows > 0")
    }
}

impl CropRows for BinaryImage {
    fn rows(&self) -> usize {
        self.height()
    }
    fn keep_rows(&self, rows: usize) -> Self {
        self.crop_rows(rows).expect("rows > 0")
    }
}

/// Crops the rows below the lowest contour (plus the margin) when that
/// contour ends above the crop limit. Returns the image and the y offset of
/// its first row, which is always 0 since only bottom rows are removed.
pub fn flexible_crop<I: CropRows + Clone>(img: &I, cs: &ContourSet, p: &DetectorParams) -> (I, usize) {
    let Some(anchor) = cs.iter().map(|c| c.bbox.bottom() - 1).max() else {
        return (img.clone(), 0);
    };
    if anchor >= p.crop_limit_for(img.rows()) {
        return (img.clone(), 0);
    }
    let rows = (anchor + p.crop_margin).min(img.rows());
    (img.keep_rows(rows), 0)
}

/// Case of a Module 1 scene: whether the leftmost contour sits in the first
/// manual slot.
pub fn module1_case(cs: &ContourSet, p: &DetectorParams) -> Option<Case> {
    let leftmost = cs
        .iter()
        .min_by(|a, b| a.bbox.x.cmp(&b.bbox.x).then(a.centroid.x.total_cmp(&b.centroid.x)))?;
    Some(if p.manual_box.rect_at(0).contains(leftmost.centroid) {
        Case::FirstSlotOccupied
    } else {
        Case::FirstSlotEmpty
    })
}

/// Slot boxes for a classified scene.
///
/// Derived templates are tiled to the right with a stride of their own
/// width; manual boxes use the manual width. Tiling stops once the next box
/// would cross the right edge, and never exceeds `slot_count` boxes.
pub fn derive_boxes(cs: &ContourSet, p: &DetectorParams, mode: Module) -> Result<Vec<SlotBox>> {
    let width = cs.width as f64;
    let manual = &p.manual_box;
    let mut boxes = Vec::new();
    match mode {
        Module::Module2 => {
            let n = tile_count(width, manual.rect_at(0), 0, p.slot_count);
            boxes.extend((0..n).map(|k| SlotBox::from_rect(k, manual.rect_at(k))));
        }
        Module::Module1 => {
            if cs.is_empty() {
                return Err(Error::EmptyContourSet);
            }
            for k in 0..p.slot_count {
                let slot = manual.rect_at(k);
                if k > 0 && slot.center.x + slot.width / 2.0 > width {
                    break;
                }
                let members: Vec<&Contour> = cs.iter().filter(|c| slot.contains(c.centroid)).collect();
                if members.is_empty() {
                    boxes.push(SlotBox::from_rect(k, slot));
                    continue;
                }
                let template = template_rect(&members);
                let n = tile_count(width, template, k, p.slot_count);
                for j in 0..n {
                    let mut r = template;
                    r.center.x += j as f64 * template.width;
                    boxes.push(SlotBox::from_rect(k + j, r));
                }
                break;
            }
        }
    }
    Ok(boxes)
}

/// Boxes that fit from `first` onward, capped so indices stay below
/// `slot_count`.
fn tile_count(image_width: f64, first: RotatedRect, first_index: usize, slot_count: usize) -> usize {
    let left = (first.center.x - first.width / 2.0).max(0.0);
    let fit = if first.width > 0.0 {
        ((image_width - left) / first.width + 1e-9).floor().max(0.0) as usize
    } else {
        0
    };
    fit.max(1).min(slot_count.saturating_sub(first_index))
}

/// Box template from contours: their joint minimum-area rectangle, turned so
/// the width axis is the one closest to horizontal.
pub fn template_rect(members: &[&Contour]) -> RotatedRect {
    let points: Vec<(usize, usize)> = members.iter().flat_map(|c| c.points.iter().copied()).collect();
    let mut r = min_area_rect_of_pixels(&points).expect("non-empty contours");
    if r.angle_deg > 45.0 {
        r.angle_deg -= 90.0;
        std::mem::swap(&mut r.width, &mut r.height);
    }
    r
}

/// Counts contour centroids inside each box; a box is occupied when the
/// count reaches the threshold.
pub fn judge_occupancy(boxes: &[SlotBox], cs: &ContourSet, p: &DetectorParams) -> Vec<Verdict> {
    boxes
        .iter()
        .map(|b| {
            let rect = b.rect();
            let count = cs.iter().filter(|c| rect.contains(c.centroid)).count();
            Verdict {
                index: b.index,
                occupied: count >= p.occupancy_count_threshold,
                slot_box: *b,
                contour_count: count,
            }
        })
        .collect()
}

/// Fixed-length bit string: extra verdicts are dropped, missing slots read
/// as vacant.
pub fn bit_string(verdicts: &[Verdict], slot_count: usize) -> String {
    (0..slot_count)
        .map(|i| match verdicts.get(i) {
            Some(v) if v.occupied => '1',
            _ => '0',
        })
        .collect()
}

/// Assembles a report, truncating verdicts to `slot_count`.
pub fn build_report(
    mut verdicts: Vec<Verdict>,
    slot_count: usize,
    canvas: &RgbImage,
    module: Module,
    case: Option<Case>,
) -> SlotReport {
    verdicts.truncate(slot_count);
    let bit_string = bit_string(&verdicts, slot_count);
    let annotated = annotate(canvas, &verdicts);
    SlotReport {
        verdicts,
        bit_string,
        annotated,
        module,
        case,
    }
}

pub fn detect(img: &RgbImage, p: &DetectorParams, canny_lo: f64, canny_hi: f64) -> Result<SlotReport> {
    Ok(detect_with_stages(img, p, CannyThresholds::new(canny_lo, canny_hi)?)?.report)
}

/// Full pipeline, keeping every intermediate raster.
pub fn detect_with_stages(img: &RgbImage, p: &DetectorParams, thresholds: CannyThresholds) -> Result<Detection> {
    p.validate()?;
    let resized = resize_rgb(img, p.resize_width, p.resize_height)?;
    let gray = to_grayscale(&resized);
    let blur = gaussian_blur_3x3(&gray);
    let trunc = truncate_threshold(&blur, p.truncate_threshold);
    let edges = canny(&trunc, thresholds.low, thresholds.high)?;
    let kernel = p.kernel_orientation.kernel();
    let morph = dilate(&erode(&edges, &kernel, p.erode_iterations)?, &kernel, p.dilate_iterations)?;
    let all = find_external_contours(&morph, p.connectivity);
    let (kept, mut filtered) = remove_false_contours(&all, &morph, p)?;
    let module = classify_module(&kept, p);
    let case = match module {
        Module::Module1 => {
            filtered = flexible_crop(&filtered, &kept, p).0;
            module1_case(&kept, p)
        }
        Module::Module2 => None,
    };
    let boxes = derive_boxes(&kept, p, module)?;
    let verdicts = judge_occupancy(&boxes, &kept, p);
    let report = build_report(verdicts, p.slot_count, &resized, module, case);
    Ok(Detection {
        report,
        stages: Stages {
            gray,
            blur,
            trunc,
            canny: edges,
            morph,
            filtered,
        },
        contours: kept,
    })
}

#[cfg(test)]
mod tests;
