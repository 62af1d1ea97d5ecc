use super::Verdict;
use crate::geometry::Point2;
use crate::image::RgbImage;

pub const OCCUPIED_COLOR: [u8; 3] = [255, 0, 0];
pub const VACANT_COLOR: [u8; 3] = [0, 255, 0];
/// Outline thickness in pixels, centered on the box perimeter.
pub const STROKE_WIDTH: f64 = 2.0;

/// Draws each slot box outline, red when occupied and green when vacant,
/// onto a copy of `img`. Boxes are clipped to the image.
pub fn annotate(img: &RgbImage, verdicts: &[Verdict]) -> RgbImage {
    let mut out = img.clone();
    let half = STROKE_WIDTH / 2.0;
    for v in verdicts {
        let rect = v.slot_box.rect();
        let color = if v.occupied { OCCUPIED_COLOR } else { VACANT_COLOR };
        let (u, n) = rect.axes();
        let (hw, hh) = (rect.width / 2.0, rect.height / 2.0);
        let corners = rect.corners();
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for c in corners {
            x0 = x0.min(c.x);
            y0 = y0.min(c.y);
            x1 = x1.max(c.x);
            y1 = y1.max(c.y);
        }
        let xs = ((x0 - half - 1.0).floor().max(0.0) as usize)..=((x1 + half + 1.0).ceil().max(0.0) as usize).min(out.width() - 1);
        let ys = ((y0 - half - 1.0).floor().max(0.0) as usize)..=((y1 + half + 1.0).ceil().max(0.0) as usize).min(out.height() - 1);
        for y in ys {
            for x in xs.clone() {
                let d = Point2::new(x as f64 - rect.center.x, y as f64 - rect.center.y);
                let a = (d.x * u.x + d.y * u.y).abs();
                let b = (d.x * n.x + d.y * n.y).abs();
                let in_outer = a < hw + half && b < hh + half;
                let in_inner = a < hw - half && b < hh - half;
                if in_outer && !in_inner {
                    out.set(x, y, color);
                }
            }
        }
    }
    out
}
