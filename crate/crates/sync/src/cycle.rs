use parkscan_core::netpbm;
use parkscan_core::{detect, LotConfig};
use thiserror::Error;

use crate::object::{ObjectKind, ObjectStore, StoreError};
use crate::state::SyncState;

/// What a detector hands back for one source image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectOutput {
    /// Encoded annotated image.
    pub annotated: Vec<u8>,
    pub bit_string: String,
}

pub trait Detector {
    fn detect(&self, source_name: &str, bytes: &[u8]) -> Result<DetectOutput, String>;
}

impl<F: Fn(&str, &[u8]) -> Result<DetectOutput, String>> Detector for F {
    fn detect(&self, source_name: &str, bytes: &[u8]) -> Result<DetectOutput, String> {
        self(source_name, bytes)
    }
}

/// The full pipeline on netpbm input, with the annotated frame as binary PPM.
#[derive(Clone, Debug)]
pub struct PipelineDetector {
    pub config: LotConfig,
}

impl PipelineDetector {
    pub fn new(config: LotConfig) -> Self {
        Self { config }
    }
}

impl Detector for PipelineDetector {
    fn detect(&self, _name: &str, bytes: &[u8]) -> Result<DetectOutput, String> {
        let img = netpbm::decode(bytes).map_err(|e| e.to_string())?.into_rgb();
        let (lo, hi) = (self.config.canny_lo, self.config.canny_hi);
        let report = detect(&img, &self.config.detector, lo, hi).map_err(|e| e.to_string())?;
        Ok(DetectOutput {
            annotated: netpbm::encode_ppm(&report.annotated),
            bit_string: report.bit_string,
        })
    }
}

/// Points between the steps of processing one source image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Fetched,
    Detected,
    PutImage,
    PutText,
    Marked,
}

impl Step {
    pub const ALL: [Step; 5] = [Step::Fetched, Step::Detected, Step::PutImage, Step::PutText, Step::Marked];
}

pub fn result_image_name(source_id: &str) -> String {
    format!("{source_id}_annotated.ppm")
}

pub fn result_text_name(source_id: &str) -> String {
    format!("{source_id}_slots.txt")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Published {
    pub source_id: String,
    pub image_id: String,
    pub text_id: String,
    pub bit_string: String,
    pub annotated: Vec<u8>,
}

#[derive(Debug, Default)]
pub struct CycleReport {
    pub published: Vec<Published>,
    /// Source ids left pending, with the reason.
    pub failed: Vec<(String, String)>,
    pub already_processed: usize,
}

#[derive(Debug, Error)]
pub enum SyncError {
    /// The store could not even be listed; retry the whole cycle later.
    #[error("store unavailable: {0}")]
    Store(#[from] StoreError),
    #[error("state file: {0}")]
    State(#[from] std::io::Error),
    /// The checkpoint hook stopped the cycle.
    #[error("interrupted after {step:?} on {source_id}")]
    Interrupted { step: Step, source_id: String },
}

impl SyncError {
    pub fn is_retryable(&self) -> bool {
        match self {
            SyncError::Store(e) => e.is_retryable(),
            SyncError::State(_) => false,
            SyncError::Interrupted { .. } => true,
        }
    }
}

/// One poll: every unprocessed source image is fetched, detected, published
/// as a result image and a result text, then marked processed.
pub fn sync_cycle(store: &dyn ObjectStore, detector: &dyn Detector, state: &mut SyncState) -> Result<CycleReport, SyncError> {
    sync_cycle_with(store, detector, state, &mut |_, _| true)
}

/// As [`sync_cycle`], calling `checkpoint(step, source_id)` after each step;
/// returning `false` stops the cycle there, as a crash would.
///
/// Results are content addressed and detection is deterministic, so
/// repeating any prefix of the steps after a restart stores nothing twice.
pub fn sync_cycle_with(
    store: &dyn ObjectStore,
    detector: &dyn Detector,
    state: &mut SyncState,
    checkpoint: &mut dyn FnMut(Step, &str) -> bool,
) -> Result<CycleReport, SyncError> {
    let sources = store.list(ObjectKind::SourceImage)?;
    state.last_poll = Some(crate::object::now_secs());
    let mut report = CycleReport::default();
    for id in sources {
        if state.is_processed(&id) {
            report.already_processed += 1;
            continue;
        }
        match process_one(store, detector, state, &id, checkpoint) {
            Ok(p) => report.published.push(p),
            Err(Failure::Skip(reason)) => {
                log::warn!("{id}: {reason}");
                report.failed.push((id, reason));
            }
            Err(Failure::Fatal(e)) => return Err(e),
        }
    }
    Ok(report)
}

enum Failure {
    Skip(String),
    Fatal(SyncError),
}

fn process_one(
    store: &dyn ObjectStore,
    detector: &dyn Detector,
    state: &mut SyncState,
    id: &str,
    checkpoint: &mut dyn FnMut(Step, &str) -> bool,
) -> Result<Published, Failure> {
    let mut step = |s: Step| {
        if checkpoint(s, id) {
            Ok(())
        } else {
            Err(Failure::Fatal(SyncError::Interrupted {
                step: s,
                source_id: id.to_string(),
            }))
        }
    };
    let skip = |e: StoreError| Failure::Skip(e.to_string());

    let source = store.fetch(id).map_err(skip)?;
    step(Step::Fetched)?;
    let out = detector.detect(id, &source.bytes).map_err(|e| Failure::Skip(format!("detection failed: {e}")))?;
    step(Step::Detected)?;
    let image_id = store
        .put(ObjectKind::ResultImage, &result_image_name(id), &out.annotated)
        .map_err(skip)?;
    step(Step::PutImage)?;
    let text = format!("{}\n", out.bit_string);
    let text_id = store
        .put(ObjectKind::ResultText, &result_text_name(id), text.as_bytes())
        .map_err(skip)?;
    step(Step::PutText)?;
    state.mark_processed(id).map_err(|e| Failure::Fatal(e.into()))?;
    step(Step::Marked)?;
    Ok(Published {
        source_id: id.to_string(),
        image_id,
        text_id,
        bit_string: out.bit_string,
        annotated: out.annotated,
    })
}
