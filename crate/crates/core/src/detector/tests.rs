use super::*;
use crate::contours::{BBox, Connectivity};

fn contour(area: usize, top: usize, angle: f64) -> Contour {
    Contour {
        points: vec![(10, top)],
        pixels: vec![(10, top)],
        area,
        bbox: BBox { x: 10, y: top, w: 1, h: 1 },
        ellipse_angle: angle,
        centroid: Point2::new(10.0, top as f64),
    }
}

fn set_of(contours: Vec<Contour>, width: usize, height: usize) -> ContourSet {
    ContourSet { contours, width, height }
}

/// Contours of filled axis-aligned rectangles `(x, y, w, h)`.
fn rect_contours(width: usize, height: usize, rects: &[(usize, usize, usize, usize)]) -> ContourSet {
    let img = BinaryImage::from_fn(width, height, |x, y| {
        rects.iter().any(|&(rx, ry, rw, rh)| x >= rx && x < rx + rw && y >= ry && y < ry + rh)
    })
    .unwrap();
    find_external_contours(&img, Connectivity::Eight)
}

fn drops(area: usize, top: usize, angle: f64) -> bool {
    is_false_contour(&contour(area, top, angle), &DetectorParams::default())
}

#[test]
fn false_contour_examples() {
    assert!(drops(69, 100, 0.0));
    assert!(!drops(70, 100, 0.0));
    assert!(drops(500, 100, 90.0));
    assert!(!drops(500, 270, 0.0));
    assert!(drops(500, 271, 0.0));
    assert!(!drops(500, 100, 80.0));
    assert!(!drops(500, 100, 100.0));
}

#[test]
fn removal_scrubs_mask_and_is_idempotent() {
    let p = DetectorParams::default();
    let cs = rect_contours(40, 40, &[(1, 1, 10, 7), (20, 20, 3, 3)]);
    let mask = BinaryImage::from_fn(40, 40, |x, y| {
        (1..11).contains(&x) && (1..8).contains(&y) || (20..23).contains(&x) && (20..23).contains(&y)
    })
    .unwrap();
    let (kept, scrubbed) = remove_false_contours(&cs, &mask, &p).unwrap();
    assert_eq!(kept.len(), 1);
    assert_eq!(kept.contours[0].area, 70);
    assert_eq!(scrubbed.count_ones(), 70);
    let (again, again_mask) = remove_false_contours(&kept, &scrubbed, &p).unwrap();
    assert_eq!(again, kept);
    assert_eq!(again_mask, scrubbed);

    let wrong = BinaryImage::new(10, 10).unwrap();
    assert_eq!(remove_false_contours(&cs, &wrong, &p), Err(Error::DimensionMismatch));
}

#[test]
fn module_classification() {
    let p = DetectorParams::default();
    let n = |k: usize| set_of((0..k).map(|_| contour(100, 10, 0.0)).collect(), 100, 100);
    assert_eq!(classify_module(&n(5), &p), Module::Module1);
    assert_eq!(classify_module(&n(0), &p), Module::Module2);
    assert_eq!(classify_module(&n(4), &p), Module::Module2);
}

#[test]
fn crop_below_lowest_contour() {
    let p = DetectorParams {
        crop_limit: Some(400),
        ..DetectorParams::default()
    };
    let img = GrayImage::new(50, 540).unwrap();
    let mut c = contour(100, 250, 0.0);
    c.bbox.h = 51; // bottom row 300
    let cs = set_of(vec![c.clone()], 50, 540);
    assert_eq!(flexible_crop(&img, &cs, &p).0.height(), 310);

    c.bbox.h = 151; // bottom row 400, at the limit
    let cs = set_of(vec![c], 50, 540);
    assert_eq!(flexible_crop(&img, &cs, &p).0.height(), 540);

    let empty = set_of(vec![], 50, 540);
    assert_eq!(flexible_crop(&img, &empty, &p), (img.clone(), 0));
}

#[test]
fn default_crop_limit_is_three_quarters() {
    assert_eq!(DetectorParams::default().crop_limit_for(540), 405);
}

#[test]
fn template_tiling_from_first_slot() {
    let p = DetectorParams::default();
    let cs = rect_contours(960, 540, &[(0, 120, 100, 60)]);
    let boxes = derive_boxes(&cs, &p, Module::Module1).unwrap();
    assert_eq!(boxes.len(), 4);
    for (k, b) in boxes.iter().enumerate() {
        assert_eq!(b.index, k);
        assert!((b.width - 100.0).abs() < 1e-6, "{b:?}");
        assert!((b.height - 60.0).abs() < 1e-6);
        assert!(b.angle_deg.abs() < 1e-6);
        assert!((b.center.x - (49.5 + 100.0 * k as f64)).abs() < 1e-6);
        assert!((b.center.y - 149.5).abs() < 1e-6);
    }
}

#[test]
fn tiling_stops_at_image_edge() {
    let p = DetectorParams {
        slot_count: 10,
        ..DetectorParams::default()
    };
    let cs = rect_contours(350, 300, &[(0, 120, 100, 60)]);
    assert_eq!(derive_boxes(&cs, &p, Module::Module1).unwrap().len(), 3);
}

#[test]
fn manual_tiling() {
    let p = DetectorParams {
        manual_box: ManualBox {
            width: 120.0,
            height: 80.0,
            angle_deg: 0.0,
            origin_x: 60.0,
            origin_y: 100.0,
        },
        ..DetectorParams::default()
    };
    let boxes = derive_boxes(&set_of(vec![], 960, 540), &p, Module::Module2).unwrap();
    let xs: Vec<f64> = boxes.iter().map(|b| b.center.x).collect();
    assert_eq!(xs, vec![60.0, 180.0, 300.0, 420.0]);
    assert!(boxes.iter().all(|b| b.width == 120.0 && b.height == 80.0));
}

#[test]
fn first_slot_empty_rederives_from_occupied_slot() {
    let p = DetectorParams::default();
    // car in slot 1 (x 240..480), slot 0 empty
    let cs = rect_contours(960, 540, &[(250, 110, 200, 80)]);
    assert_eq!(module1_case(&cs, &p), Some(Case::FirstSlotEmpty));
    let boxes = derive_boxes(&cs, &p, Module::Module1).unwrap();
    assert_eq!(boxes.len(), 4);
    assert_eq!(boxes[0].rect(), p.manual_box.rect_at(0));
    for (j, b) in boxes[1..].iter().enumerate() {
        assert!((b.width - 200.0).abs() < 1e-6);
        assert!((b.height - 80.0).abs() < 1e-6);
        assert!((b.center.x - (349.5 + 200.0 * j as f64)).abs() < 1e-6);
    }
    let occupied = rect_contours(960, 540, &[(20, 110, 200, 80)]);
    assert_eq!(module1_case(&occupied, &p), Some(Case::FirstSlotOccupied));
    assert_eq!(module1_case(&set_of(vec![], 960, 540), &p), None);
    assert_eq!(derive_boxes(&set_of(vec![], 960, 540), &p, Module::Module1), Err(Error::EmptyContourSet));
}

#[test]
fn template_is_turned_toward_horizontal() {
    let cs = rect_contours(100, 100, &[(10, 10, 20, 60)]);
    let members: Vec<&Contour> = cs.iter().collect();
    let r = template_rect(&members);
    assert!(r.angle_deg > -45.0 && r.angle_deg <= 45.0);
    let (long, short) = (r.width.max(r.height), r.width.min(r.height));
    assert!((long - 60.0).abs() < 1e-6 && (short - 20.0).abs() < 1e-6);
}

fn boxes_at(xs: &[f64]) -> Vec<SlotBox> {
    xs.iter()
        .enumerate()
        .map(|(i, &x)| SlotBox {
            index: i,
            center: Point2::new(x, 50.0),
            width: 40.0,
            height: 40.0,
            angle_deg: 0.0,
        })
        .collect()
}

fn centroid_at(x: f64, y: f64) -> Contour {
    let mut c = contour(100, 10, 0.0);
    c.centroid = Point2::new(x, y);
    c
}

#[test]
fn occupancy_judgement() {
    let p = DetectorParams::default();
    let boxes = boxes_at(&[20.0, 60.0, 100.0, 140.0]);
    let empty = judge_occupancy(&boxes, &set_of(vec![], 200, 100), &p);
    assert_eq!(bit_string(&empty, 4), "0000");
    let one_each = set_of(boxes.iter().map(|b| centroid_at(b.center.x, 50.0)).collect(), 200, 100);
    assert_eq!(bit_string(&judge_occupancy(&boxes, &one_each, &p), 4), "1111");
    let some = set_of(vec![centroid_at(60.0, 40.0), centroid_at(140.0, 60.0)], 200, 100);
    let v = judge_occupancy(&boxes, &some, &p);
    assert_eq!(bit_string(&v, 4), "0101");
    assert_eq!(v[1].contour_count, 1);

    let strict = DetectorParams {
        occupancy_count_threshold: 2,
        ..p
    };
    assert_eq!(bit_string(&judge_occupancy(&boxes, &some, &strict), 4), "0000");
}

#[test]
fn bit_string_length_is_fixed() {
    let p = DetectorParams::default();
    for n in [0usize, 3, 4, 5, 7] {
        let boxes = boxes_at(&(0..n).map(|i| 20.0 + 40.0 * i as f64).collect::<Vec<_>>());
        let cs = set_of(boxes.iter().map(|b| centroid_at(b.center.x, 50.0)).collect(), 400, 100);
        let v = judge_occupancy(&boxes, &cs, &p);
        let canvas = RgbImage::new(400, 100).unwrap();
        let r = build_report(v, 4, &canvas, Module::Module1, None);
        assert_eq!(r.bit_string.len(), 4);
        assert_eq!(r.bit_string, "1".repeat(n.min(4)) + &"0".repeat(4 - n.min(4)));
        assert_eq!(r.verdicts.len(), n.min(4));
    }
}

#[test]
fn annotation_colors_and_locality() {
    let canvas = RgbImage::filled(200, 100, [9, 9, 9]).unwrap();
    let boxes = boxes_at(&[30.0, 120.0]);
    let verdicts = vec![
        Verdict { index: 0, occupied: true, slot_box: boxes[0], contour_count: 1 },
        Verdict { index: 1, occupied: false, slot_box: boxes[1], contour_count: 0 },
    ];
    let out = annotate(&canvas, &verdicts);
    // box 0 spans x 10..50, box 1 spans x 100..140, y 30..70
    assert_eq!(out.get(10, 50), OCCUPIED_COLOR);
    assert_eq!(out.get(30, 30), OCCUPIED_COLOR);
    assert_eq!(out.get(140, 50), VACANT_COLOR);
    assert_eq!(out.get(30, 50), [9, 9, 9]);
    assert_eq!(out.get(120, 50), [9, 9, 9]);
    for y in 0..100 {
        for x in 0..200 {
            let near = boxes.iter().any(|b| {
                let (dx, dy) = ((x as f64 - b.center.x).abs(), (y as f64 - b.center.y).abs());
                dx <= 21.0 && dy <= 21.0
            });
            if !near {
                assert_eq!(out.get(x, y), [9, 9, 9], "({x},{y})");
            }
        }
    }
    assert_eq!(canvas.get(10, 50), [9, 9, 9]);
}

#[test]
fn annotation_clips_boxes_outside_image() {
    let canvas = RgbImage::filled(50, 50, [0, 0, 0]).unwrap();
    let mut b = boxes_at(&[45.0])[0];
    b.center.y = 45.0;
    let far = SlotBox { center: Point2::new(500.0, 500.0), ..b };
    let v = vec![
        Verdict { index: 0, occupied: false, slot_box: b, contour_count: 0 },
        Verdict { index: 1, occupied: false, slot_box: far, contour_count: 0 },
    ];
    let out = annotate(&canvas, &v);
    assert_eq!(out.get(25, 45), VACANT_COLOR);
}

#[test]
fn stage_names() {
    let g = GrayImage::new(2, 2).unwrap();
    let b = BinaryImage::new(2, 2).unwrap();
    let s = Stages {
        gray: g.clone(),
        blur: g.clone(),
        trunc: g,
        canny: b.clone(),
        morph: b.clone(),
        filtered: b,
    };
    let names: Vec<&str> = s.named().iter().map(|(n, _)| *n).collect();
    assert_eq!(names, ["1gray", "2blur", "3trunc", "4canny", "5morph", "6filtered"]);
}

#[test]
fn detect_rejects_bad_thresholds() {
    let img = RgbImage::new(10, 10).unwrap();
    assert!(detect(&img, &DetectorParams::default(), 200.0, 100.0).is_err());
    let bad = DetectorParams {
        slot_count: 0,
        ..DetectorParams::default()
    };
    assert!(detect(&img, &bad, 50.0, 150.0).is_err());
}

#[test]
fn tiny_images_do_not_panic() {
    for (w, h) in [(1, 1), (2, 1), (1, 3), (7, 5)] {
        let img = RgbImage::filled(w, h, [200, 10, 10]).unwrap();
        let p = DetectorParams {
            resize_width: w,
            resize_height: h,
            ..DetectorParams::default()
        };
        let r = detect(&img, &p, 50.0, 150.0).unwrap();
        assert_eq!(r.bit_string.len(), 4);
    }
}
