use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    SourceImage,
    ResultImage,
    ResultText,
}

impl ObjectKind {
    pub const ALL: [ObjectKind; 3] = [ObjectKind::SourceImage, ObjectKind::ResultImage, ObjectKind::ResultText];

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::SourceImage => "source_image",
            ObjectKind::ResultImage => "result_image",
            ObjectKind::ResultText => "result_text",
        }
    }
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectKind {
    type Err = StoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ObjectKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| StoreError::Rejected(format!("unknown object kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoredObject {
    pub object_id: String,
    pub kind: ObjectKind,
    pub bytes: Vec<u8>,
    /// Unix seconds, UTC.
    pub created_at: u64,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("object {0} not found")]
    NotFound(String),
    #[error("object {0} does not match its content hash")]
    Integrity(String),
    /// Transport or availability failure; the operation may be retried.
    #[error("store unavailable: {0}")]
    Unavailable(String),
    /// Permanent refusal: bad input, permissions, quota.
    #[error("rejected: {0}")]
    Rejected(String),
}

impl StoreError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, StoreError::Unavailable(_))
    }
}

pub type StoreResult<T> = Result<T, StoreError>;

pub const HASH_HEX_LEN: usize = 16;

/// `<first 16 hex digits of sha256(bytes)>_<name>`.
pub fn object_id(name: &str, bytes: &[u8]) -> String {
    format!("{}_{name}", content_hash(bytes))
}

pub fn content_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(&digest[..HASH_HEX_LEN / 2])
}

/// Splits an id into its hash prefix and name.
pub fn split_id(id: &str) -> Option<(&str, &str)> {
    let (hash, name) = id.split_once('_')?;
    let ok = hash.len() == HASH_HEX_LEN && hash.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b));
    (ok && validate_name(name).is_ok()).then_some((hash, name))
}

/// Checks that `bytes` hash to the prefix embedded in `id`.
pub fn verify(id: &str, bytes: &[u8]) -> StoreResult<()> {
    match split_id(id) {
        Some((hash, _)) if hash == content_hash(bytes) => Ok(()),
        Some(_) => Err(StoreError::Integrity(id.to_string())),
        None => Err(StoreError::Rejected(format!("malformed object id {id:?}"))),
    }
}

/// Names become file names and URL path segments, so they are restricted to
/// a portable character set.
pub fn validate_name(name: &str) -> StoreResult<()> {
    let portable = |c: char| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-');
    if name.is_empty() || name.len() > 200 || name.starts_with('.') || !name.chars().all(portable) {
        return Err(StoreError::Rejected(format!("invalid object name {name:?}")));
    }
    Ok(())
}

pub(crate) fn validate_put(name: &str, bytes: &[u8]) -> StoreResult<()> {
    validate_name(name)?;
    if bytes.is_empty() {
        return Err(StoreError::Rejected("empty payload".into()));
    }
    Ok(())
}

/// Object storage as the sync loop sees it. Implementations must tolerate
/// concurrent readers.
pub trait ObjectStore: Send + Sync {
    /// Ids of every object of `kind`, ordered by creation time, then id.
    fn list(&self, kind: ObjectKind) -> StoreResult<Vec<String>>;

    /// The object with its payload; fails if the payload no longer matches
    /// the id's hash.
    fn fetch(&self, object_id: &str) -> StoreResult<StoredObject>;

    /// Durably stores the payload and returns its id. Storing the same name
    /// and bytes again returns the same id without a second object.
    fn put(&self, kind: ObjectKind, name: &str, bytes: &[u8]) -> StoreResult<String>;
}

impl<S: ObjectStore + ?Sized> ObjectStore for std::sync::Arc<S> {
    fn list(&self, kind: ObjectKind) -> StoreResult<Vec<String>> {
        (**self).list(kind)
    }
    fn fetch(&self, object_id: &str) -> StoreResult<StoredObject> {
        (**self).fetch(object_id)
    }
    fn put(&self, kind: ObjectKind, name: &str, bytes: &[u8]) -> StoreResult<String> {
        (**self).put(kind, name, bytes)
    }
}

pub(crate) fn now_secs() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
