//! Store selection and result forwarding shared by `sync` and `serve`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use parkscan_sync::{HttpStore, LocalDirStore, ObjectStore, Published};

/// A local directory, or an `http://` base URL.
pub fn open(location: &str, token: Option<String>) -> anyhow::Result<Arc<dyn ObjectStore>> {
    if location.starts_with("http://") || location.starts_with("https://") {
        Ok(Arc::new(HttpStore::new(location, token)?))
    } else {
        Ok(Arc::new(LocalDirStore::create(location).with_context(|| format!("opening store {location}"))?))
    }
}

/// Default state file: inside a local store, else the working directory.
pub fn default_state(location: &str) -> PathBuf {
    if location.contains("://") {
        PathBuf::from("sync_state.tsv")
    } else {
        Path::new(location).join("sync_state.tsv")
    }
}

/// Posts a published result to a running slot service.
pub struct ServiceClient {
    client: reqwest::blocking::Client,
    base: String,
    lot: String,
    token: Option<String>,
}

impl ServiceClient {
    pub fn new(base: &str, lot: &str, token: Option<String>) -> Self {
        Self {
            client: reqwest::blocking::Client::new(),
            base: base.trim_end_matches('/').to_string(),
            lot: lot.to_string(),
            token,
        }
    }

    pub fn forward(&self, p: &Published) -> anyhow::Result<()> {
        let auth = |r: reqwest::blocking::RequestBuilder| match &self.token {
            Some(t) => r.bearer_auth(t),
            None => r,
        };
        let resp = auth(self.client.post(format!("{}/lots/{}/report", self.base, self.lot)))
            .json(&serde_json::json!({ "bit_string": p.bit_string }))
            .send()?;
        if !resp.status().is_success() {
            bail!("report rejected: {} {}", resp.status(), resp.text().unwrap_or_default());
        }
        let resp = auth(self.client.put(format!("{}/lots/{}/annotated", self.base, self.lot)))
            .body(p.annotated.clone())
            .send()?;
        if !resp.status().is_success() {
            bail!("image rejected: {} {}", resp.status(), resp.text().unwrap_or_default());
        }
        Ok(())
    }
}
