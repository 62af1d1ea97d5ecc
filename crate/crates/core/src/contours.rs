//! External contour extraction over connected components and the geometric
//! properties used to filter them.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::geometry::{min_area_rect_of_pixels, Point2, RotatedRect};
use crate::image::BinaryImage;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
            Connectivity::Eight => &[
                (-1, -1),
                (0, -1),
                (1, -1),
                (-1, 0),
                (1, 0),
                (-1, 1),
                (0, 1),
                (1, 1),
            ],
        }
    }

    fn dual(self) -> Self {
        match self {
            Connectivity::Four => Connectivity::Eight,
            Connectivity::Eight => Connectivity::Four,
        }
    }
}

/// Axis-aligned pixel bounding box; `w` and `h` count pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl BBox {
    /// One past the last row.
    pub fn bottom(&self) -> usize {
        self.y + self.h
    }

    /// One past the last column.
    pub fn right(&self) -> usize {
        self.x + self.w
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.right() && y >= self.y && y < self.bottom()
    }
}

/// Outer boundary of one connected component plus cached geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    /// Boundary pixels in clockwise (screen) order from the top-left pixel.
    pub points: Vec<(usize, usize)>,
    /// Every pixel of the component, in raster order.
    pub pixels: Vec<(usize, usize)>,
    /// Component size with interior holes filled.
    pub area: usize,
    pub bbox: BBox,
    /// Principal-axis orientation in `[0, 180)` degrees.
    pub ellipse_angle: f64,
    pub centroid: Point2,
}

impl Contour {
    fn from_component(pixels: Vec<(usize, usize)>, points: Vec<(usize, usize)>, conn: Connectivity) -> Self {
        let bbox = bbox_of(&pixels);
        let area = filled_area(&pixels, bbox, conn);
        let n = pixels.len() as f64;
        let (sx, sy) = pixels
            .iter()
            .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x as f64, sy + y as f64));
        Self {
            ellipse_angle: ellipse_angle(&pixels),
            centroid: Point2::new(sx / n, sy / n),
            points,
            pixels,
            area,
            bbox,
        }
    }

    /// Minimum-area rotated rectangle covering the boundary pixels as unit
    /// squares.
    pub fn min_area_rect(&self) -> RotatedRect {
        min_area_rect_of_pixels(&self.points).expect("contours are non-empty")
    }

    /// Top row of the bounding box.
    pub fn top(&self) -> usize {
        self.bbox.y
    }
}

/// Contours of one binary image.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourSet {
    pub contours: Vec<Contour>,
    pub width: usize,
    pub height: usize,
}

impl ContourSet {
    pub fn len(&self) -> usize {
        self.contours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contours.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Contour> {
        self.contours.iter()
    }
}

pub fn contour_area(c: &Contour) -> usize {
    c.area
}

pub fn fit_ellipse_angle(c: &Contour) -> f64 {
    c.ellipse_angle
}

/// One external contour per connected foreground component.
///
/// Components are discovered in raster order, so each trace starts at the
/// component's top-left-most pixel. Holes are not traced.
pub fn find_external_contours(img: &BinaryImage, conn: Connectivity) -> ContourSet {
    let (w, h) = (img.width(), img.height());
    let mut labels = vec![0u32; w * h];
    let mut contours = Vec::new();
    let mut next_label = 0u32;
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if !img.get(x, y) || labels[y * w + x] != 0 {
                continue;
            }
            next_label += 1;
            labels[y * w + x] = next_label;
            queue.push_back((x, y));
            let mut pixels = Vec::new();
            while let Some((cx, cy)) = queue.pop_front() {
                pixels.push((cx, cy));
                for &(dx, dy) in conn.offsets() {
                    let (nx, ny) = (cx as isize + dx, cy as isize + dy);
                    if img.get_or_zero(nx, ny) {
                        let j = ny as usize * w + nx as usize;
                        if labels[j] == 0 {
                            labels[j] = next_label;
                            queue.push_back((nx as usize, ny as usize));
                        }
                    }
                }
            }
            pixels.sort_by_key(|&(px, py)| (py, px));
            let label = next_label;
            let points = trace_boundary((x, y), |px, py| {
                px >= 0 && py >= 0 && (px as usize) < w && (py as usize) < h && labels[py as usize * w + px as usize] == label
            });
            contours.push(Contour::from_component(pixels, points, conn));
        }
    }
    ContourSet {
        contours,
        width: w,
        height: h,
    }
}

// Clockwise on screen, starting at west.
const MOORE: [(isize, isize); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

fn moore_index(dx: isize, dy: isize) -> usize {
    MOORE.iter().position(|&d| d == (dx, dy)).expect("unit offset")
}

/// Moore-neighbor boundary tracing. `start` must be the first component
/// pixel in raster order, so its west neighbor is background. Tracing stops
/// when the walk is back at `start` and about to repeat its first move.
fn trace_boundary(start: (usize, usize), inside: impl Fn(isize, isize) -> bool) -> Vec<(usize, usize)> {
    let start_i = (start.0 as isize, start.1 as isize);
    let mut points = vec![start];
    let mut p = start_i;
    let mut back = 0usize;
    let mut first_move = None;
    // Each boundary pixel is visited at most four times.
    let limit = 8 * 1024 * 1024;
    for _ in 0..limit {
        let mut found = None;
        for k in 1..=8 {
            let d = (back + k) % 8;
            let q = (p.0 + MOORE[d].0, p.1 + MOORE[d].1);
            if inside(q.0, q.1) {
                let prev = MOORE[(d + 7) % 8];
                let c = (p.0 + prev.0, p.1 + prev.1);
                found = Some((q, moore_index(c.0 - q.0, c.1 - q.1)));
                break;
            }
        }
        let Some((q, new_back)) = found else {
            break; // isolated pixel
        };
        if p == start_i {
            match first_move {
                None => first_move = Some(q),
                Some(f) if f == q => break,
                Some(_) => points.push(start),
            }
        }
        p = q;
        back = new_back;
        if p != start_i {
            points.push((p.0 as usize, p.1 as usize));
        }
    }
    points
}

fn bbox_of(pixels: &[(usize, usize)]) -> BBox {
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    for &(x, y) in pixels {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    BBox {
        x: x0,
        y: y0,
        w: x1 - x0 + 1,
        h: y1 - y0 + 1,
    }
}

/// Pixels of the component plus any background it encloses.
fn filled_area(pixels: &[(usize, usize)], bbox: BBox, conn: Connectivity) -> usize {
    let (w, h) = (bbox.w + 2, bbox.h + 2);
    let mut blocked = vec![false; w * h];
    for &(x, y) in pixels {
        blocked[(y - bbox.y + 1) * w + (x - bbox.x + 1)] = true;
    }
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    seen[0] = true;
    let mut outside = 0;
    while let Some((x, y)) = queue.pop_front() {
        outside += 1;
        for &(dx, dy) in conn.dual().offsets() {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                continue;
            }
            let j = ny as usize * w + nx as usize;
            if !seen[j] && !blocked[j] {
                seen[j] = true;
                queue.push_back((nx as usize, ny as usize));
            }
        }
    }
    w * h - outside
}

/// Principal-axis angle in degrees within `[0, 180)`, from second-order
/// central moments: `½·atan2(2μ11, μ20 − μ02)`.
///
/// Moments are accumulated as exact integers (scaled by `n²`), so the result
/// is exactly translation invariant. Fewer than five pixels fall back to the
/// bounding-box diagonal.
pub fn ellipse_angle(pixels: &[(usize, usize)]) -> f64 {
    if pixels.is_empty() {
        return 0.0;
    }
    let n = pixels.len() as i128;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0i128, 0i128, 0i128, 0i128, 0i128);
    for &(x, y) in pixels {
        let (x, y) = (x as i128, y as i128);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let mu20 = n * sxx - sx * sx;
    let mu02 = n * syy - sy * sy;
    let mu11 = n * sxy - sx * sy;
    if mu20 == 0 && mu02 == 0 {
        return 0.0;
    }
    let deg = if pixels.len() < 5 {
        let b = bbox_of(pixels);
        let a = ((b.h - 1) as f64).atan2((b.w - 1) as f64).to_degrees();
        if mu11 < 0 {
            180.0 - a
        } else {
            a
        }
    } else {
        0.5 * (2.0 * mu11 as f64).atan2((mu20 - mu02) as f64).to_degrees()
    };
    let deg = deg.rem_euclid(180.0);
    if deg >= 180.0 {
        0.0
    } else {
        deg
    }
}
