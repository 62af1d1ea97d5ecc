#![allow(dead_code)]

use std::sync::Arc;

use parkscan_core::{GpsPoint, LotConfig};
use parkscan_service::{ApiOptions, SlotService};

pub fn lot(id: &str, slots: usize) -> LotConfig {
    let mut cfg = LotConfig {
        lot_id: id.into(),
        ..LotConfig::default()
    };
    cfg.detector.slot_count = slots;
    cfg.slots_gps = (0..slots)
        .map(|i| GpsPoint {
            lat: 12.840715,
            lon: 80.1534 + 0.00003 * i as f64,
        })
        .collect();
    cfg
}

/// Serves `service` on an ephemeral port and returns the base URL.
pub fn spawn_server(service: Arc<SlotService>, options: ApiOptions) -> String {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            parkscan_service::serve(listener, service, options).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}
