//! Planar helpers: convex hull, minimum-area enclosing rectangle and
//! rotated-rectangle membership.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }

    #[inline]
    fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }
}

/// Rectangle of size `width × height` rotated by `angle_deg` about its
/// center. `width` runs along the direction `(cos a, sin a)` in image
/// coordinates (y down).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotatedRect {
    pub center: Point2,
    pub width: f64,
    pub height: f64,
    pub angle_deg: f64,
}

impl RotatedRect {
    /// Unit vectors along the width and height axes.
    pub fn axes(&self) -> (Point2, Point2) {
        let (s, c) = self.angle_deg.to_radians().sin_cos();
        (Point2::new(c, s), Point2::new(-s, c))
    }

    /// Corners in order: top-left, top-right, bottom-right, bottom-left
    /// (relative to the rectangle's own axes).
    pub fn corners(&self) -> [Point2; 4] {
        let (u, v) = self.axes();
        let (hw, hh) = (self.width / 2.0, self.height / 2.0);
        let at = |a: f64, b: f64| {
            Point2::new(
                self.center.x + u.x * a + v.x * b,
                self.center.y + u.y * a + v.y * b,
            )
        };
        [at(-hw, -hh), at(hw, -hh), at(hw, hh), at(-hw, hh)]
    }

    /// Closed-set membership test.
    pub fn contains(&self, p: Point2) -> bool {
        let (u, v) = self.axes();
        let d = p.sub(self.center);
        let eps = 1e-9;
        d.dot(u).abs() <= self.width / 2.0 + eps && d.dot(v).abs() <= self.height / 2.0 + eps
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

/// Convex hull by Andrew's monotone chain. Collinear points are dropped;
/// the result is counter-clockwise in a y-up frame.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Point2, a: Point2, b: Point2| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut hull: Vec<Point2> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Rectangle covering pixel centers padded by half a pixel on every side,
/// chosen to minimize the padded area. Candidate orientations are the
/// axis-aligned one and every convex hull edge, so the result is never
/// larger than the pixel bounding box.
pub fn min_area_rect_of_pixels(pixels: &[(usize, usize)]) -> Option<RotatedRect> {
    let centers: Vec<Point2> = pixels.iter().map(|&(x, y)| Point2::new(x as f64, y as f64)).collect();
    let hull = convex_hull(&centers);
    if hull.is_empty() {
        return None;
    }
    let n = hull.len();
    let edges = (0..n).filter(|_| n > 1).map(|i| hull[(i + 1) % n].sub(hull[i]));
    let mut best: Option<(f64, RotatedRect)> = None;
    for e in std::iter::once(Point2::new(1.0, 0.0)).chain(edges) {
        let len = e.dot(e).sqrt();
        let u = Point2::new(e.x / len, e.y / len);
        let v = Point2::new(-u.y, u.x);
        let (mut u0, mut u1, mut v0, mut v1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in &hull {
            let (a, b) = (p.dot(u), p.dot(v));
            u0 = u0.min(a);
            u1 = u1.max(a);
            v0 = v0.min(b);
            v1 = v1.max(b);
        }
        let (w, h) = (u1 - u0 + 1.0, v1 - v0 + 1.0);
        if best.as_ref().is_none_or(|(b, _)| w * h < *b - 1e-9) {
            let (cu, cv) = ((u0 + u1) / 2.0, (v0 + v1) / 2.0);
            let rect = RotatedRect {
                center: Point2::new(u.x * cu + v.x * cv, u.y * cu + v.y * cv),
                width: w,
                height: h,
                angle_deg: u.y.atan2(u.x).to_degrees(),
            };
            best = Some((w * h, rect));
        }
    }
    best.map(|(_, r)| normalized(r))
}

/// Minimum-area enclosing rectangle via rotating calipers over the convex
/// hull. The returned angle lies in `[0, 90)`.
pub fn min_area_rect(points: &[Point2]) -> Option<RotatedRect> {
    let hull = convex_hull(points);
    match hull.len() {
        0 => None,
        1 => Some(RotatedRect {
            center: hull[0],
            width: 0.0,
            height: 0.0,
            angle_deg: 0.0,
        }),
        2 => {
            let d = hull[1].sub(hull[0]);
            Some(normalized(RotatedRect {
                center: Point2::new((hull[0].x + hull[1].x) / 2.0, (hull[0].y + hull[1].y) / 2.0),
                width: d.dot(d).sqrt(),
                height: 0.0,
                angle_deg: d.y.atan2(d.x).to_degrees(),
            }))
        }
        n => {
            let next = |i: usize| (i + 1) % n;
            let mut best: Option<(f64, RotatedRect)> = None;
            let (mut hi_u, mut lo_u, mut hi_v) = (0usize, 0usize, 0usize);
            for i in 0..n {
                let a = hull[i];
                let e = hull[next(i)].sub(a);
                let len = e.dot(e).sqrt();
                let u = Point2::new(e.x / len, e.y / len);
                // Hull is CCW in y-up terms, so the interior is on the +v side.
                let v = Point2::new(-u.y, u.x);
                let du = |k: usize| hull[k].sub(a).dot(u);
                let dv = |k: usize| hull[k].sub(a).dot(v);
                if i == 0 {
                    hi_u = (0..n).max_by(|&p, &q| du(p).total_cmp(&du(q))).unwrap();
                    lo_u = (0..n).min_by(|&p, &q| du(p).total_cmp(&du(q))).unwrap();
                    hi_v = (0..n).max_by(|&p, &q| dv(p).total_cmp(&dv(q))).unwrap();
                } else {
                    for _ in 0..n {
                        if du(next(hi_u)) > du(hi_u) + 1e-12 { hi_u = next(hi_u) } else { break }
                    }
                    for _ in 0..n {
                        if dv(next(hi_v)) > dv(hi_v) + 1e-12 { hi_v = next(hi_v) } else { break }
                    }
                    for _ in 0..n {
                        if du(next(lo_u)) < du(lo_u) - 1e-12 { lo_u = next(lo_u) } else { break }
                    }
                }
                let (u0, u1, h) = (du(lo_u), du(hi_u), dv(hi_v));
                let w = u1 - u0;
                let area = w * h;
                if best.as_ref().is_none_or(|(b, _)| area < *b - 1e-9) {
                    let mid = (u0 + u1) / 2.0;
                    let center = Point2::new(
                        a.x + u.x * mid + v.x * h / 2.0,
                        a.y + u.y * mid + v.y * h / 2.0,
                    );
                    best = Some((
                        area,
                        RotatedRect {
                            center,
                            width: w,
                            height: h,
                            angle_deg: u.y.atan2(u.x).to_degrees(),
                        },
                    ));
                }
            }
            best.map(|(_, r)| normalized(r))
        }
    }
}

fn normalized(mut r: RotatedRect) -> RotatedRect {
    let mut a = r.angle_deg.rem_euclid(180.0);
    if a >= 90.0 {
        a -= 90.0;
        std::mem::swap(&mut r.width, &mut r.height);
    }
    if 90.0 - a < 1e-9 {
        a = 0.0;
        std::mem::swap(&mut r.width, &mut r.height);
    }
    if a < 1e-9 {
        a = 0.0;
    }
    r.angle_deg = a;
    r
}
