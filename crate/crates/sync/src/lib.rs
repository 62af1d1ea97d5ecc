//! Source-image ingest and result publication over pluggable object stores.
//!
//! A sync cycle lists unprocessed source images, runs detection on each and
//! publishes an annotated image plus a bit-string text file, recording
//! progress in a durable [`SyncState`].

mod cycle;
pub mod http;
mod local;
mod memory;
mod object;
mod state;

pub use cycle::{
    result_image_name, result_text_name, sync_cycle, sync_cycle_with, CycleReport, DetectOutput, Detector,
    PipelineDetector, Published, Step, SyncError,
};
pub use http::HttpStore;
pub use local::LocalDirStore;
pub use memory::MemoryStore;
pub use object::{
    content_hash, object_id, split_id, validate_name, verify, ObjectKind, ObjectStore, StoreError, StoreResult,
    StoredObject,
};
pub use state::SyncState;
