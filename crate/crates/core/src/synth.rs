//! Seeded synthetic parking-lot scenes with known occupancy.
//!
//! A scene is a light ground plane with one row of equally spaced slots.
//! Occupied slots hold a dark car body with a lighter roof panel, slightly
//! rotated and offset. Optional speckle noise, occluding pillars and a
//! distractor strip below the slot row exercise the noise filters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, RotatedRect};
use crate::image::RgbImage;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthParams {
    pub width: usize,
    pub height: usize,
    pub slot_count: usize,
    /// Horizontal distance between slot centers.
    pub pitch: f64,
    /// Center of slot 0.
    pub origin_x: f64,
    pub origin_y: f64,
    pub car_width: f64,
    pub car_height: f64,
    pub max_rotation_deg: f64,
    /// Maximum offset of a car from its slot center, per axis. The
    /// horizontal offset is further limited so the rotated car stays
    /// `cell_margin` pixels inside its slot cell.
    pub jitter: f64,
    pub cell_margin: f64,
    pub occupancy_prob: f64,
    /// Number of small dark squares scattered over the ground.
    pub speckles: usize,
    pub speckle_min: usize,
    pub speckle_max: usize,
    /// Vertical pillars partially hiding the row.
    pub pillars: usize,
    /// Dark strip below the slot row.
    pub distractor: bool,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            width: 960,
            height: 540,
            slot_count: 4,
            pitch: 240.0,
            origin_x: 120.0,
            origin_y: 150.0,
            car_width: 212.0,
            car_height: 100.0,
            max_rotation_deg: 12.0,
            jitter: 8.0,
            cell_margin: 5.0,
            occupancy_prob: 0.5,
            speckles: 0,
            speckle_min: 2,
            speckle_max: 4,
            pillars: 0,
            distractor: false,
        }
    }
}

impl SynthParams {
    pub fn noisy() -> Self {
        Self {
            speckles: 40,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::ZeroDimension);
        }
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.slot_count == 0 || self.pitch <= 0.0 {
            return bad("slot_count and pitch must be positive");
        }
        if self.car_width <= 0.0 || self.car_height <= 0.0 || self.jitter < 0.0 || self.cell_margin < 0.0 {
            return bad("car size must be positive, jitter and margin non-negative");
        }
        if !(0.0..=1.0).contains(&self.occupancy_prob) {
            return bad("occupancy_prob must lie in [0, 1]");
        }
        if self.speckle_min == 0 || self.speckle_min > self.speckle_max {
            return bad("speckle sizes must satisfy 0 < min <= max");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Car {
    pub slot: usize,
    pub body: RotatedRect,
}

#[derive(Clone, Debug)]
pub struct Scene {
    pub image: RgbImage,
    /// Ground-truth occupancy, one character per slot.
    pub truth: String,
    pub cars: Vec<Car>,
}

/// Renders the scene for `seed`. The same parameters and seed always give
/// the same pixels.
pub fn generate(p: &SynthParams, seed: u64) -> Result<Scene> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ground: u8 = rng.gen_range(190..=210);
    let mut img = RgbImage::filled(p.width, p.height, [ground, ground, ground])?;

    let mut cars = Vec::new();
    let mut truth = String::with_capacity(p.slot_count);
    for slot in 0..p.slot_count {
        if !rng.gen_bool(p.occupancy_prob) {
            truth.push('0');
            continue;
        }
        truth.push('1');
        let angle_deg = rng.gen_range(-p.max_rotation_deg..=p.max_rotation_deg);
        let dx = rng.gen_range(-p.jitter..=p.jitter);
        let dy = rng.gen_range(-p.jitter..=p.jitter);
        let (sin, cos) = angle_deg.to_radians().sin_cos();
        let half_extent = (p.car_width * cos.abs() + p.car_height * sin.abs()) / 2.0;
        let room = (p.pitch / 2.0 - p.cell_margin - half_extent).max(0.0);
        let body = RotatedRect {
            center: Point2::new(
                p.origin_x + slot as f64 * p.pitch + dx.clamp(-room, room),
                p.origin_y + dy,
            ),
            width: p.car_width,
            height: p.car_height,
            angle_deg,
        };
        let shade: u8 = rng.gen_range(40..=80);
        let tint: i16 = rng.gen_range(-10..=10);
        let roof = RotatedRect {
            width: body.width * 0.6,
            height: body.height * 0.5,
            ..body
        };
        fill_rect(&mut img, &body, tinted(shade, tint));
        fill_rect(&mut img, &roof, tinted(shade + 55, tint));
        cars.push(Car { slot, body });
    }

    if p.distractor {
        let top = (p.height as f64 * 0.7) as usize;
        let rows = (p.height / 20).max(2);
        for y in top..(top + rows).min(p.height) {
            for x in p.width / 10..p.width - p.width / 10 {
                img.set(x, y, [70, 70, 70]);
            }
        }
    }

    for _ in 0..p.pillars {
        let x0 = rng.gen_range(0..p.width);
        let w = rng.gen_range(3..=6);
        let shade: u8 = rng.gen_range(150..=180);
        for y in 0..p.height {
            for x in x0..(x0 + w).min(p.width) {
                img.set(x, y, [shade, shade, shade]);
            }
        }
    }

    scatter_speckles(&mut img, p, &cars, &mut rng);

    Ok(Scene { image: img, truth, cars })
}

/// Grey with a slight colour cast that leaves luminance close to `shade`.
fn tinted(shade: u8, tint: i16) -> [u8; 3] {
    let s = shade as i16;
    let c = |v: i16| v.clamp(0, 255) as u8;
    [c(s + tint), c(s), c(s - tint)]
}

fn fill_rect(img: &mut RgbImage, r: &RotatedRect, rgb: [u8; 3]) {
    let reach = (r.width.hypot(r.height) / 2.0).ceil() + 1.0;
    let x0 = (r.center.x - reach).max(0.0) as usize;
    let y0 = (r.center.y - reach).max(0.0) as usize;
    let x1 = ((r.center.x + reach) as usize).min(img.width().saturating_sub(1));
    let y1 = ((r.center.y + reach) as usize).min(img.height().saturating_sub(1));
    for y in y0..=y1 {
        for x in x0..=x1 {
            if r.contains(Point2::new(x as f64, y as f64)) {
                img.set(x, y, rgb);
            }
        }
    }
}

const SPECKLE_CAR_GAP: f64 = 6.0;
const SPECKLE_SPACING: f64 = 12.0;

fn scatter_speckles(img: &mut RgbImage, p: &SynthParams, cars: &[Car], rng: &mut ChaCha8Rng) {
    let grown: Vec<RotatedRect> = cars
        .iter()
        .map(|c| RotatedRect {
            width: c.body.width + 2.0 * (SPECKLE_CAR_GAP + p.speckle_max as f64),
            height: c.body.height + 2.0 * (SPECKLE_CAR_GAP + p.speckle_max as f64),
            ..c.body
        })
        .collect();
    let mut placed: Vec<Point2> = Vec::new();
    let mut attempts = 0;
    while placed.len() < p.speckles && attempts < p.speckles * 50 {
        attempts += 1;
        let size = rng.gen_range(p.speckle_min..=p.speckle_max);
        if size >= p.width || size >= p.height {
            break;
        }
        let x = rng.gen_range(0..p.width - size);
        let y = rng.gen_range(0..p.height - size);
        let shade: u8 = rng.gen_range(40..=90);
        let c = Point2::new(x as f64 + size as f64 / 2.0, y as f64 + size as f64 / 2.0);
        if grown.iter().any(|r| r.contains(c)) {
            continue;
        }
        if placed.iter().any(|q| (q.x - c.x).hypot(q.y - c.y) < SPECKLE_SPACING) {
            continue;
        }
        placed.push(c);
        for yy in y..y + size {
            for xx in x..x + size {
                img.set(xx, yy, [shade, shade, shade]);
            }
        }
    }
}
