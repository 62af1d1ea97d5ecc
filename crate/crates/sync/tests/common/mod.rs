#![allow(dead_code)]

use std::sync::Arc;

use parkscan_core::netpbm;
use parkscan_core::synth::{generate, SynthParams};
use parkscan_sync::ObjectStore;

/// Serves `store` on an ephemeral port from a background runtime and
/// returns the base URL.
pub fn spawn_server(store: Arc<dyn ObjectStore>, token: Option<String>) -> String {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            parkscan_sync::http::serve(listener, store, token).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}

/// A synthetic scene as PPM bytes, with its truth bit string.
pub fn scene_ppm(seed: u64) -> (Vec<u8>, String) {
    let s = generate(&SynthParams::default(), seed).unwrap();
    (netpbm::encode_ppm(&s.image), s.truth)
}
