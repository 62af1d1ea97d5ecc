mod common;

use std::sync::{Arc, Barrier};

use common::{lot, spawn_server};
use parkscan_service::{ApiOptions, ErrorBody, LotSummary, Navigation, ReserveAllBody, SlotService, SlotState};
use reqwest::blocking::Client;
use reqwest::StatusCode;

fn server(options: ApiOptions) -> (String, Arc<SlotService>) {
    let svc = Arc::new(SlotService::in_memory(vec![lot("lot-1", 4)]).unwrap());
    (spawn_server(svc.clone(), options), svc)
}

fn error_code(resp: reqwest::blocking::Response) -> String {
    resp.json::<ErrorBody>().unwrap().code
}

fn report(c: &Client, base: &str, bits: &str) -> reqwest::blocking::Response {
    c.post(format!("{base}/lots/lot-1/report"))
        .json(&serde_json::json!({ "bit_string": bits }))
        .send()
        .unwrap()
}

#[test]
fn slots_and_reports() {
    let (base, _) = server(ApiOptions::default());
    let c = Client::new();
    let lots: Vec<LotSummary> = c.get(format!("{base}/lots")).send().unwrap().json().unwrap();
    assert_eq!(lots.len(), 1);
    assert_eq!((lots[0].lot_id.as_str(), lots[0].slot_count), ("lot-1", 4));

    let slots: Vec<SlotState> = c.get(format!("{base}/lots/lot-1/slots")).send().unwrap().json().unwrap();
    assert!(slots.iter().all(|s| !s.reserved));
    let raw: serde_json::Value = c.get(format!("{base}/lots/lot-1/slots")).send().unwrap().json().unwrap();
    assert_eq!(raw[0]["occupancy"], "vacant");
    assert_eq!(raw[0]["gps"]["lat"], 12.840715);

    assert_eq!(report(&c, &base, "0101").status(), StatusCode::OK);
    let slots: Vec<SlotState> = c.get(format!("{base}/lots/lot-1/slots")).send().unwrap().json().unwrap();
    let bits: String = slots
        .iter()
        .map(|s| if s.occupancy == parkscan_service::Occupancy::Occupied { '1' } else { '0' })
        .collect();
    assert_eq!(bits, "0101");

    let resp = report(&c, &base, "010");
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
    assert_eq!(error_code(resp), "length_mismatch");

    let resp = c.get(format!("{base}/lots/nope/slots")).send().unwrap();
    assert_eq!(resp.status(), StatusCode::NOT_FOUND);
    assert_eq!(error_code(resp), "unknown_lot");
}

#[test]
fn reservation_endpoints() {
    let (base, _) = server(ApiOptions::default());
    let c = Client::new();
    report(&c, &base, "0110");
    let url = |n: &str| format!("{base}/lots/lot-1/slots/{n}/reserve");

    let resp = c.post(url("0")).send().unwrap();
    assert_eq!(resp.status(), StatusCode::UNAUTHORIZED);
    assert_eq!(error_code(resp), "unauthorized");

    let resp = c.post(url("0")).bearer_auth("alice").send().unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let slot: SlotState = resp.json().unwrap();
    assert!(slot.reserved && slot.reserved_by == "alice");

    let resp = c.post(url("0")).bearer_auth("bob").send().unwrap();
    assert_eq!(resp.status(), StatusCode::CONFLICT);
    assert_eq!(error_code(resp), "already_reserved");

    let resp = c.post(url("1")).bearer_auth("bob").send().unwrap();
    assert_eq!(resp.status(), StatusCode::PRECONDITION_FAILED);
    assert_eq!(error_code(resp), "occupied");

    for n in ["4", "x"] {
        let resp = c.post(url(n)).bearer_auth("bob").send().unwrap();
        assert_eq!(resp.status(), StatusCode::NOT_FOUND);
        assert_eq!(error_code(resp), "unknown_slot");
    }

    let resp = c.delete(url("0")).bearer_auth("bob").send().unwrap();
    assert_eq!(resp.status(), StatusCode::FORBIDDEN);
    let resp = c.delete(url("3")).bearer_auth("bob").send().unwrap();
    assert_eq!(resp.status(), StatusCode::CONFLICT);
    assert_eq!(error_code(resp), "not_reserved");
    let slot: SlotState = c.delete(url("0")).bearer_auth("alice").send().unwrap().json().unwrap();
    assert!(!slot.reserved);

    let all = |who: &str| -> ReserveAllBody {
        let resp = c.post(format!("{base}/lots/lot-1/reserve-all")).bearer_auth(who).send().unwrap();
        assert_eq!(resp.status(), StatusCode::OK);
        resp.json().unwrap()
    };
    assert_eq!(all("carol").reserved, [0, 3]);
    assert!(all("carol").reserved.is_empty());
}

#[test]
fn navigation_endpoint() {
    let (base, _) = server(ApiOptions::default());
    let nav: Navigation = Client::new()
        .get(format!("{base}/lots/lot-1/slots/0/navigation"))
        .send()
        .unwrap()
        .json()
        .unwrap();
    assert_eq!(nav.url, "https://www.google.com/maps/dir/?api=1&destination=12.840715,80.153400");
    let resp = Client::new().get(format!("{base}/lots/lot-1/slots/9/navigation")).send().unwrap();
    assert_eq!(resp.status(), StatusCode::NOT_FOUND);
}

#[test]
fn annotated_image() {
    let (base, svc) = server(ApiOptions::default());
    let c = Client::new();
    let url = format!("{base}/lots/lot-1/annotated");
    let resp = c.get(&url).send().unwrap();
    assert_eq!(resp.status(), StatusCode::NOT_FOUND);
    assert_eq!(error_code(resp), "no_image");

    let ppm = b"P6\n1 1\n255\n\x00\xff\x00".to_vec();
    assert_eq!(c.put(&url).body(ppm.clone()).send().unwrap().status(), StatusCode::NO_CONTENT);
    let resp = c.get(&url).send().unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.headers()["content-type"], "image/x-portable-pixmap");
    assert_eq!(resp.bytes().unwrap().as_ref(), ppm.as_slice());
    assert_eq!(svc.annotated("lot-1").unwrap().as_slice(), ppm.as_slice());

    assert_eq!(c.put(&url).body(Vec::new()).send().unwrap().status(), StatusCode::BAD_REQUEST);
}

#[test]
fn ingest_token_guards_writes_only() {
    let (base, _) = server(ApiOptions {
        ingest_token: Some("s3cret".into()),
        ..ApiOptions::default()
    });
    let c = Client::new();
    let body = serde_json::json!({ "bit_string": "1111" });
    let url = format!("{base}/lots/lot-1/report");
    assert_eq!(c.post(&url).json(&body).send().unwrap().status(), StatusCode::UNAUTHORIZED);
    assert_eq!(
        c.post(&url).bearer_auth("wrong").json(&body).send().unwrap().status(),
        StatusCode::UNAUTHORIZED
    );
    assert_eq!(
        c.post(&url).bearer_auth("s3cret").json(&body).send().unwrap().status(),
        StatusCode::OK
    );
    assert_eq!(
        c.put(format!("{base}/lots/lot-1/annotated")).body("P5").send().unwrap().status(),
        StatusCode::UNAUTHORIZED
    );
    assert_eq!(c.get(format!("{base}/lots/lot-1/slots")).send().unwrap().status(), StatusCode::OK);
}

#[test]
fn serves_static_bundle_at_root() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>grid</html>").unwrap();
    let (base, _) = server(ApiOptions {
        static_dir: Some(dir.path().to_path_buf()),
        ..ApiOptions::default()
    });
    let c = Client::new();
    let resp = c.get(format!("{base}/")).send().unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.text().unwrap(), "<html>grid</html>");
    assert_eq!(c.get(format!("{base}/lots")).send().unwrap().status(), StatusCode::OK);
    assert_eq!(c.get(format!("{base}/missing.js")).send().unwrap().status(), StatusCode::NOT_FOUND);
}

#[test]
fn missing_static_bundle_is_not_fatal() {
    let (base, _) = server(ApiOptions {
        static_dir: Some("/nonexistent/parkscan-ui".into()),
        ..ApiOptions::default()
    });
    assert_eq!(Client::new().get(format!("{base}/lots")).send().unwrap().status(), StatusCode::OK);
}

#[test]
fn concurrent_http_reserves_have_one_winner() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Arc::new(SlotService::open(vec![lot("lot-1", 4)], dir.path(), true).unwrap());
    let base = spawn_server(svc.clone(), ApiOptions::default());
    let barrier = Arc::new(Barrier::new(32));
    let handles: Vec<_> = (0..32)
        .map(|i| {
            let base = base.clone();
            let barrier = barrier.clone();
            std::thread::spawn(move || {
                let c = Client::new();
                barrier.wait();
                c.post(format!("{base}/lots/lot-1/slots/2/reserve"))
                    .bearer_auth(format!("client-{i}"))
                    .send()
                    .unwrap()
                    .status()
            })
        })
        .collect();
    let statuses: Vec<StatusCode> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert_eq!(statuses.iter().filter(|s| **s == StatusCode::OK).count(), 1);
    assert_eq!(statuses.iter().filter(|s| **s == StatusCode::CONFLICT).count(), 31);
    assert_eq!(svc.ledger("lot-1").unwrap().len(), 1);
}

#[test]
fn restart_serves_identical_slots() {
    let dir = tempfile::tempdir().unwrap();
    let fetch = |base: &str| -> String {
        Client::new()
            .get(format!("{base}/lots/lot-1/slots"))
            .send()
            .unwrap()
            .text()
            .unwrap()
    };
    let before = {
        let svc = Arc::new(SlotService::open(vec![lot("lot-1", 4)], dir.path(), true).unwrap());
        let base = spawn_server(svc, ApiOptions::default());
        let c = Client::new();
        report(&c, &base, "1001");
        c.post(format!("{base}/lots/lot-1/reserve-all")).bearer_auth("a").send().unwrap();
        c.delete(format!("{base}/lots/lot-1/slots/1/reserve")).bearer_auth("a").send().unwrap();
        fetch(&base)
    };
    let svc = Arc::new(SlotService::open(vec![lot("lot-1", 4)], dir.path(), true).unwrap());
    let base = spawn_server(svc, ApiOptions::default());
    assert_eq!(fetch(&base), before);
}
