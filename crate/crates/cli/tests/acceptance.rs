//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod oracles;

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::{Arc, Barrier};
use std::time::{Duration, Instant};

use parkscan_core::detector::{build_report, is_false_contour, remove_false_contours};
use parkscan_core::eval::{accuracy_from_counts, evaluate, mean_accuracy, ManifestEntry};
use parkscan_core::imaging::{dilate, erode, gaussian_blur_3x3, truncate_threshold};
use parkscan_core::synth::{generate, SynthParams};
use parkscan_core::{
    detect, netpbm, BBox, BinaryImage, Contour, ContourSet, DetectorParams, GrayImage, LotConfig, Module,
    Point2, RgbImage, RotatedRect, SlotBox, Verdict,
};
use parkscan_service::{replay, ServiceError, SlotService};
use parkscan_sync::{
    split_id, sync_cycle, sync_cycle_with, LocalDirStore, ObjectKind, ObjectStore, PipelineDetector, Step, SyncState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eq3_arithmetic() -> Outcome {
    let clear = accuracy_from_counts(109, 109, 4).map_err(|e| e.to_string())?;
    let occluded = accuracy_from_counts(139, 138, 4).map_err(|e| e.to_string())?;
    check((clear.accuracy_pct - 100.0).abs() < 1e-9, || format!("109/109 gave {}", clear.accuracy_pct))?;
    check((occluded.accuracy_pct - 99.28).abs() <= 0.01, || {
        format!("139/138 gave {}", occluded.accuracy_pct)
    })?;
    let mean = mean_accuracy(&[clear.clone(), occluded.clone()]).unwrap();
    check((mean - 99.64).abs() <= 0.01, || format!("mean {mean}"))?;

    // the same counts through the file-level scorer
    let truth: BTreeMap<String, String> = (0..139).map(|i| (format!("t{i:03}"), "0101".to_string())).collect();
    let manifest: Vec<ManifestEntry> = truth
        .keys()
        .enumerate()
        .map(|(i, id)| ManifestEntry {
            image_id: id.clone(),
            bit_string: Some(if i == 77 { "0111" } else { "0101" }.to_string()),
            error: None,
            timestamp: "0".into(),
        })
        .collect();
    let scored = evaluate(&manifest, &truth, 4).map_err(|e| e.to_string())?;
    check(scored == occluded_with_slots(&occluded), || format!("evaluate gave {scored:?}"))?;
    check(accuracy_from_counts(0, 0, 4).is_err(), || "0 tests accepted".into())?;
    Ok(format!(
        "{:.2}% / {:.2}% / mean {:.2}%",
        clear.accuracy_pct, occluded.accuracy_pct, mean
    ))
}

fn occluded_with_slots(r: &parkscan_core::eval::EvalResult) -> parkscan_core::eval::EvalResult {
    let mut r = r.clone();
    r.slot_accuracy_pct = (139.0 * 4.0 - 1.0) / (139.0 * 4.0) * 100.0;
    r
}

fn imaging_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0_a11ce);
    let images = 250;
    for i in 0..images {
        let g = oracles::random_gray(&mut rng, 64);
        check(gaussian_blur_3x3(&g) == oracles::blur(&g), || format!("blur differs on image {i}"))?;
        let t: u8 = rng.gen();
        check(truncate_threshold(&g, t) == oracles::truncate(&g, t), || {
            format!("truncate differs on image {i}")
        })?;

        let b = oracles::random_binary(&mut rng, 64);
        let k = oracles::random_kernel(&mut rng);
        let n = rng.gen_range(1..=3);
        let lib = erode(&b, &k, n).map_err(|e| e.to_string())?;
        check(lib == oracles::repeat(&b, n, |x| oracles::erode(x, &k)), || {
            format!("erode differs on image {i}")
        })?;
        let lib = dilate(&b, &k, n).map_err(|e| e.to_string())?;
        check(lib == oracles::repeat(&b, n, |x| oracles::dilate(x, &k)), || {
            format!("dilate differs on image {i}")
        })?;
        for eight in [false, true] {
            check(oracles::library_components(&b, eight) == oracles::label(&b, eight), || {
                format!("labeling differs on image {i} (8-connected: {eight})")
            })?;
        }
    }
    Ok(format!("{images} random images up to 64x64, exact"))
}

fn truncate_pairs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pairs = 10_000;
    for _ in 0..pairs {
        let (p, t): (u8, u8) = (rng.gen(), rng.gen());
        let img = GrayImage::from_raw(1, 1, vec![p]).unwrap();
        let got = truncate_threshold(&img, t).get(0, 0);
        check(got == p.min(t), || format!("truncate({p}, {t}) = {got}"))?;
    }
    Ok(format!("{pairs} pairs"))
}

fn contour(area: usize, top: usize, angle: f64) -> Contour {
    Contour {
        points: vec![(5, top)],
        pixels: vec![(5, top)],
        area,
        bbox: BBox { x: 5, y: top, w: 1, h: 1 },
        ellipse_angle: angle,
        centroid: Point2::new(5.0, top as f64),
    }
}

fn false_contour_boundaries() -> Outcome {
    let p = DetectorParams::default();
    let mut cases = Vec::new();
    for area in [69, 70, 71] {
        for top in [269, 270, 271] {
            for angle in [79.0, 80.0, 81.0, 99.0, 100.0, 101.0] {
                // drop below 70 px, below row 270, or strictly between 80° and 100°
                let drop = area < 70 || top > 270 || (angle > 80.0 && angle < 100.0);
                cases.push((area, top, angle, drop));
            }
        }
    }
    for &(area, top, angle, drop) in &cases {
        let c = contour(area, top, angle);
        check(is_false_contour(&c, &p) == drop, || {
            format!("area {area} top {top} angle {angle}: expected drop={drop}")
        })?;
        let set = ContourSet {
            contours: vec![c],
            width: 10,
            height: 300,
        };
        let mask = BinaryImage::from_fn(10, 300, |x, y| (x, y) == (5, top)).unwrap();
        let (kept, scrubbed) = remove_false_contours(&set, &mask, &p).map_err(|e| e.to_string())?;
        check(kept.len() == usize::from(!drop) && scrubbed.count_ones() == usize::from(!drop), || {
            format!("removal of area {area} top {top} angle {angle} disagrees with the rule")
        })?;
    }
    let dropped = cases.iter().filter(|c| c.3).count();
    Ok(format!("{} cases, {dropped} dropped", cases.len()))
}

fn synthetic_scenes() -> Outcome {
    let cfg = LotConfig::default();
    let score = |params: &SynthParams| -> Result<usize, String> {
        let mut hits = 0;
        for seed in 0..200 {
            let scene = generate(params, seed).map_err(|e| e.to_string())?;
            let report = detect(&scene.image, &cfg.detector, cfg.canny_lo, cfg.canny_hi).map_err(|e| e.to_string())?;
            hits += usize::from(report.bit_string == scene.truth);
        }
        Ok(hits)
    };
    let clean = score(&SynthParams::default())?;
    let noisy = score(&SynthParams::noisy())?;
    check(clean == 200, || format!("clean {clean}/200"))?;
    check(noisy >= 198, || format!("noisy {noisy}/200"))?;
    Ok(format!("clean {clean}/200, noisy {noisy}/200"))
}

fn bit_string_length() -> Outcome {
    let canvas = RgbImage::new(960, 540).unwrap();
    for boxes in [0usize, 3, 4, 5, 7] {
        let verdicts: Vec<Verdict> = (0..boxes)
            .map(|i| Verdict {
                index: i,
                occupied: i % 2 == 0,
                slot_box: SlotBox::from_rect(
                    i,
                    RotatedRect {
                        center: Point2::new(120.0 + 240.0 * i as f64, 150.0),
                        width: 200.0,
                        height: 100.0,
                        angle_deg: 0.0,
                    },
                ),
                contour_count: usize::from(i % 2 == 0),
            })
            .collect();
        let report = build_report(verdicts, 4, &canvas, Module::Module1, None);
        let expected: String = (0..4).map(|i| if i < boxes && i % 2 == 0 { '1' } else { '0' }).collect();
        check(report.bit_string == expected, || {
            format!("{boxes} boxes gave {:?}, expected {expected:?}", report.bit_string)
        })?;
    }
    Ok("box counts 0, 3, 4, 5, 7 all give length 4".into())
}

fn published_texts(store: &dyn ObjectStore) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for id in store.list(ObjectKind::ResultText).unwrap() {
        let name = split_id(&id).unwrap().1.to_string();
        let text = String::from_utf8(store.fetch(&id).unwrap().bytes).unwrap();
        out.entry(name).or_default().push(text);
    }
    out
}

fn sync_exactly_once() -> Outcome {
    let detector = PipelineDetector::new(LotConfig::default());
    let mut runs = 0;
    for crash_at in Step::ALL {
        for victim in 0..3 {
            let dir = tempfile::tempdir().unwrap();
            let store = LocalDirStore::create(dir.path().join("store")).unwrap();
            let mut truth = BTreeMap::new();
            for seed in [31u64, 32, 33] {
                let scene = generate(&SynthParams::default(), seed).unwrap();
                let id = store
                    .put(ObjectKind::SourceImage, &format!("cam_{seed}.ppm"), &netpbm::encode_ppm(&scene.image))
                    .unwrap();
                truth.insert(id, scene.truth);
            }
            let victim_id = truth.keys().nth(victim).unwrap().clone();
            let state_path = dir.path().join("state.tsv");

            let mut state = SyncState::open(&state_path).unwrap();
            let crashed = sync_cycle_with(&store, &detector, &mut state, &mut |step, id| {
                !(step == crash_at && id == victim_id)
            });
            check(crashed.is_err(), || format!("{crash_at:?}: crash was not injected"))?;
            drop(state);

            let mut state = SyncState::open(&state_path).unwrap();
            sync_cycle(&store, &detector, &mut state).map_err(|e| e.to_string())?;
            sync_cycle(&store, &detector, &mut state).map_err(|e| e.to_string())?;

            let texts = published_texts(&store);
            check(texts.len() == 3, || format!("{crash_at:?}/{victim}: {} texts", texts.len()))?;
            for (source, bits) in &truth {
                let name = format!("{}_slots.txt", source);
                let got = texts.get(&name).cloned().unwrap_or_default();
                check(got == vec![format!("{bits}\n")], || {
                    format!("{crash_at:?}/{victim}: {source} published {got:?}")
                })?;
            }
            let images = store.list(ObjectKind::ResultImage).unwrap().len();
            check(images == 3, || format!("{crash_at:?}/{victim}: {images} result images"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} crash points, one result pair per source each"))
}

fn lot(slots: usize) -> LotConfig {
    let mut cfg = LotConfig::default();
    cfg.detector.slot_count = slots;
    cfg.slots_gps.resize(slots, cfg.slots_gps[0]);
    cfg
}

fn reservations() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let svc = Arc::new(SlotService::open(vec![lot(4)], dir.path().join("stress"), true).map_err(|e| e.to_string())?);
    let barrier = Arc::new(Barrier::new(32));
    let handles: Vec<_> = (0..32)
        .map(|i| {
            let svc = svc.clone();
            let barrier = barrier.clone();
            std::thread::spawn(move || {
                barrier.wait();
                svc.reserve("lot-1", 2, &format!("client-{i}"))
            })
        })
        .collect();
    let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    let ok = results.iter().filter(|r| r.is_ok()).count();
    let conflicts = results
        .iter()
        .filter(|r| matches!(r, Err(ServiceError::AlreadyReserved(2))))
        .count();
    check(ok == 1 && conflicts == 31, || format!("{ok} successes, {conflicts} conflicts"))?;

    const SLOTS: usize = 5;
    let clients = ["a", "b", "c"];
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for seq in 0..1000 {
        let path = dir.path().join(format!("seq{seq}"));
        let svc = SlotService::open(vec![lot(SLOTS)], &path, false).map_err(|e| e.to_string())?;
        for _ in 0..rng.gen_range(0..40) {
            let client = clients[rng.gen_range(0..clients.len())];
            let slot = rng.gen_range(0..=SLOTS);
            // rejected operations are part of the sequence too
            let _ = match rng.gen_range(0..4) {
                0 => {
                    let bits: String = (0..SLOTS).map(|_| if rng.gen() { '1' } else { '0' }).collect();
                    svc.ingest_report("lot-1", &bits).map(drop)
                }
                1 => svc.reserve("lot-1", slot, client).map(drop),
                2 => svc.release("lot-1", slot, client).map(drop),
                _ => svc.reserve_all("lot-1", client).map(drop),
            };
        }
        let live = svc.slots("lot-1").unwrap();
        let holders: Vec<Option<String>> = live.iter().map(|s| s.reserved.then(|| s.reserved_by.clone())).collect();
        let replayed = replay(&svc.ledger("lot-1").unwrap(), SLOTS);
        check(replayed == holders, || format!("sequence {seq}: replay {replayed:?} vs live {holders:?}"))?;
        drop(svc);
        let reopened = SlotService::open(vec![lot(SLOTS)], &path, false).map_err(|e| e.to_string())?;
        check(reopened.slots("lot-1").unwrap() == live, || format!("sequence {seq}: restart differs"))?;
    }
    Ok("32 racers: 1 success, 31 conflicts; 1000 sequences replay to live state".into())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let scene = generate(&SynthParams::noisy(), 99).unwrap();
    let input = dir.path().join("frame.ppm");
    std::fs::write(&input, netpbm::encode_ppm(&scene.image)).unwrap();
    let config = dir.path().join("lot.json");
    std::fs::write(&config, LotConfig::default().to_json()).unwrap();

    let mut outputs = Vec::new();
    for run in 0..5 {
        let out = dir.path().join(format!("run{run}"));
        let status = Command::new(env!("CARGO_BIN_EXE_parkscan"))
            .args(["detect".as_ref(), input.as_os_str(), "--config".as_ref(), config.as_os_str()])
            .args(["--out".as_ref(), out.as_os_str()])
            .env_remove("PARKSCAN_CONFIG")
            .output()
            .map_err(|e| e.to_string())?;
        check(status.status.success(), || format!("run {run} failed: {status:?}"))?;
        let read = |name: &str| std::fs::read(Path::new(&out).join(name)).unwrap();
        outputs.push((read("frame_annotated.ppm"), read("frame_slots.txt")));
    }
    check(outputs.windows(2).all(|w| w[0] == w[1]), || "outputs differ between runs".into())?;
    Ok(format!(
        "5 runs byte-identical ({} byte image, bits {})",
        outputs[0].0.len(),
        String::from_utf8_lossy(&outputs[0].1).trim()
    ))
}

fn main() {
    let criteria = [
        Criterion {
            name: "accuracy arithmetic (109/109, 139/138, mean)",
            limit: Some(Duration::from_secs(1)),
            run: eq3_arithmetic,
        },
        Criterion {
            name: "imaging oracle suite",
            limit: Some(Duration::from_secs(30)),
            run: imaging_oracles,
        },
        Criterion {
            name: "truncate semantics",
            limit: Some(Duration::from_secs(1)),
            run: truncate_pairs,
        },
        Criterion {
            name: "false-contour boundaries",
            limit: None,
            run: false_contour_boundaries,
        },
        Criterion {
            name: "synthetic end-to-end",
            limit: Some(Duration::from_secs(120)),
            run: synthetic_scenes,
        },
        Criterion {
            name: "bit-string length",
            limit: None,
            run: bit_string_length,
        },
        Criterion {
            name: "sync exactly-once under crashes",
            limit: None,
            run: sync_exactly_once,
        },
        Criterion {
            name: "reservation linearizability and replay",
            limit: None,
            run: reservations,
        },
        Criterion {
            name: "determinism",
            limit: None,
            run: determinism,
        },
    ];

    // keep panics from interleaving with the report lines
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    let mut out = std::io::stdout().lock();
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (r, _) => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.as_str()),
            Err(e) => ("FAIL", e.as_str()),
        };
        failed += usize::from(result.is_err());
        writeln!(out, "{tag} {}: {detail} [{elapsed:.2?}]", c.name).unwrap();
    }
    writeln!(out, "{} of {} criteria passed", criteria.len() - failed, criteria.len()).unwrap();
    drop(out);
    if failed > 0 {
        std::process::exit(1);
    }
}
