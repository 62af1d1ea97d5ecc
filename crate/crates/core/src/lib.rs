//! Vacant parking slot detection from still images of a single row of slots.
//!
//! The pipeline turns an RGB frame into an edge map, extracts car contours,
//! drops noise contours, places one box per slot and reports occupancy as a
//! bit string (`1` occupied, `0` vacant), along with an annotated frame.
//!
//! ```
//! use parkscan_core::{detect, synth, DetectorParams};
//!
//! let scene = synth::generate(&synth::SynthParams::default(), 42).unwrap();
//! let report = detect(&scene.image, &DetectorParams::default(), 50.0, 150.0).unwrap();
//! assert_eq!(report.bit_string.len(), 4);
//! ```

pub mod config;
pub mod contours;
pub mod detector;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod image;
pub mod imaging;
pub mod netpbm;
pub mod synth;

pub use config::{ConfigError, GpsPoint, LotConfig};
pub use contours::{find_external_contours, BBox, Connectivity, Contour, ContourSet};
pub use detector::{detect, detect_with_stages, Detection, DetectorParams, Module, SlotBox, SlotReport, Verdict};
pub use error::{Error, Result};
pub use geometry::{min_area_rect, min_area_rect_of_pixels, Point2, RotatedRect};
pub use image::{BinaryImage, GrayImage, Kernel, RgbImage};
pub use imaging::CannyThresholds;
