//! Accuracy evaluation of detection results against ground truth.
//!
//! A test is one image. It counts as a correct detection only when every
//! slot matches. With `S` slots per test, total slots are `S × tests` and
//! correct slots `S × correct`, so the percentage equals `correct / tests`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("no tests to evaluate")]
    NoTests,
    #[error("{correct} correct detections exceed {tests} tests")]
    CountsInconsistent { tests: usize, correct: usize },
    #[error("slots per test must be positive")]
    ZeroSlots,
    #[error("{image_id}: result has {result} slots, truth has {truth}")]
    LengthMismatch {
        image_id: String,
        result: usize,
        truth: usize,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub tests_performed: usize,
    pub correct_detections: usize,
    pub false_detections: usize,
    pub accuracy_pct: f64,
    /// Fraction of individual slots right, for diagnostics.
    pub slot_accuracy_pct: f64,
}

/// One row of a batch manifest: either a bit string or an error.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bit_string: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timestamp: String,
}

/// Accuracy from whole-test counts.
pub fn accuracy_from_counts(tests: usize, correct: usize, slots_per_test: usize) -> Result<EvalResult, EvalError> {
    if tests == 0 {
        return Err(EvalError::NoTests);
    }
    if slots_per_test == 0 {
        return Err(EvalError::ZeroSlots);
    }
    if correct > tests {
        return Err(EvalError::CountsInconsistent { tests, correct });
    }
    let total_slots = slots_per_test * tests;
    let correct_slots = slots_per_test * correct;
    let pct = correct_slots as f64 / total_slots as f64 * 100.0;
    Ok(EvalResult {
        tests_performed: tests,
        correct_detections: correct,
        false_detections: tests - correct,
        accuracy_pct: pct,
        slot_accuracy_pct: pct,
    })
}

/// Arithmetic mean of accuracy percentages.
pub fn mean_accuracy(results: &[EvalResult]) -> Option<f64> {
    if results.is_empty() {
        return None;
    }
    Some(results.iter().map(|r| r.accuracy_pct).sum::<f64>() / results.len() as f64)
}

/// Scores manifest rows against truth. Every truth row is one test; a
/// missing or failed result counts as a false detection.
pub fn evaluate(
    manifest: &[ManifestEntry],
    truth: &BTreeMap<String, String>,
    slots_per_test: usize,
) -> Result<EvalResult, EvalError> {
    if slots_per_test == 0 {
        return Err(EvalError::ZeroSlots);
    }
    if truth.is_empty() {
        return Err(EvalError::NoTests);
    }
    let results: BTreeMap<&str, &str> = manifest
        .iter()
        .filter_map(|e| e.bit_string.as_deref().map(|b| (e.image_id.as_str(), b)))
        .collect();
    let (mut correct, mut correct_slots) = (0, 0);
    for (id, expected) in truth {
        if expected.len() != slots_per_test {
            return Err(EvalError::LengthMismatch {
                image_id: id.clone(),
                result: slots_per_test,
                truth: expected.len(),
            });
        }
        let Some(got) = results.get(id.as_str()) else {
            continue;
        };
        if got.len() != expected.len() {
            return Err(EvalError::LengthMismatch {
                image_id: id.clone(),
                result: got.len(),
                truth: expected.len(),
            });
        }
        if got == expected {
            correct += 1;
        }
        correct_slots += got.bytes().zip(expected.bytes()).filter(|(a, b)| a == b).count();
    }
    let mut r = accuracy_from_counts(truth.len(), correct, slots_per_test)?;
    r.slot_accuracy_pct = correct_slots as f64 / (truth.len() * slots_per_test) as f64 * 100.0;
    Ok(r)
}

/// Parses `<image_id> <bit_string>` lines; blank lines and `#` comments are
/// skipped.
pub fn parse_truth(text: &str) -> Result<BTreeMap<String, String>, EvalError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(id), Some(bits), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(EvalError::Parse {
                line: i + 1,
                message: "expected `<image_id> <bit_string>`".into(),
            });
        };
        if !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(EvalError::Parse {
                line: i + 1,
                message: format!("bit string {bits:?} must contain only 0 and 1"),
            });
        }
        out.insert(id.to_string(), bits.to_string());
    }
    Ok(out)
}

pub fn format_truth(rows: &[(String, String)]) -> String {
    rows.iter().map(|(id, bits)| format!("{id} {bits}\n")).collect()
}

/// Parses a JSON-lines manifest.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, EvalError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| EvalError::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn format_manifest(entries: &[ManifestEntry]) -> String {
    entries
        .iter()
        .map(|e| serde_json::to_string(e).expect("manifest serializes") + "\n")
        .collect()
}
