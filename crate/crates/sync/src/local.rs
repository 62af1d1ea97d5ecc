use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::UNIX_EPOCH;

use crate::object::{object_id, validate_put, verify, ObjectKind, ObjectStore, StoreError, StoreResult, StoredObject};

/// Objects as files under a root directory:
///
/// ```text
/// <root>/source/<id>
/// <root>/results/image/<id>
/// <root>/results/text/<id>
/// ```
///
/// Writes go to a temporary file that is renamed into place, so readers
/// never see partial payloads. Creation time is the file's mtime.
#[derive(Clone, Debug)]
pub struct LocalDirStore {
    root: PathBuf,
}

impl LocalDirStore {
    /// Opens a store, creating the layout if needed.
    pub fn create(root: impl Into<PathBuf>) -> io::Result<Self> {
        let store = Self { root: root.into() };
        for kind in ObjectKind::ALL {
            fs::create_dir_all(store.dir(kind))?;
        }
        Ok(store)
    }

    /// Opens an existing store without touching the disk. Operations fail
    /// with a retryable error while the root is missing.
    pub fn open(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn dir(&self, kind: ObjectKind) -> PathBuf {
        match kind {
            ObjectKind::SourceImage => self.root.join("source"),
            ObjectKind::ResultImage => self.root.join("results").join("image"),
            ObjectKind::ResultText => self.root.join("results").join("text"),
        }
    }

    /// Copies an arbitrary file in as a source image named after the file.
    pub fn import_source(&self, path: &Path) -> StoreResult<String> {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| StoreError::Rejected(format!("{} has no usable file name", path.display())))?;
        let bytes = fs::read(path).map_err(|e| StoreError::Rejected(format!("{}: {e}", path.display())))?;
        self.put(ObjectKind::SourceImage, name, &bytes)
    }

    fn reachable(&self) -> StoreResult<()> {
        if self.root.is_dir() {
            Ok(())
        } else {
            Err(StoreError::Unavailable(format!("{} is not a directory", self.root.display())))
        }
    }

    fn locate(&self, id: &str) -> Option<(ObjectKind, PathBuf)> {
        ObjectKind::ALL
            .into_iter()
            .map(|k| (k, self.dir(k).join(id)))
            .find(|(_, p)| p.is_file())
    }
}

fn io_error(e: io::Error) -> StoreError {
    match e.kind() {
        io::ErrorKind::PermissionDenied => StoreError::Rejected(e.to_string()),
        _ => StoreError::Unavailable(e.to_string()),
    }
}

fn mtime_secs(meta: &fs::Metadata) -> u64 {
    meta.modified()
        .ok()
        .and_then(|t| t.duration_since(UNIX_EPOCH).ok())
        .map_or(0, |d| d.as_secs())
}

impl ObjectStore for LocalDirStore {
    fn list(&self, kind: ObjectKind) -> StoreResult<Vec<String>> {
        self.reachable()?;
        let dir = self.dir(kind);
        if !dir.is_dir() {
            return Ok(Vec::new());
        }
        let mut found = Vec::new();
        for entry in fs::read_dir(&dir).map_err(io_error)? {
            let entry = entry.map_err(io_error)?;
            let Some(name) = entry.file_name().to_str().map(str::to_owned) else {
                continue;
            };
            if name.starts_with('.') {
                continue;
            }
            let meta = entry.metadata().map_err(io_error)?;
            if meta.is_file() {
                found.push((mtime_secs(&meta), name));
            }
        }
        found.sort();
        Ok(found.into_iter().map(|(_, id)| id).collect())
    }

    fn fetch(&self, id: &str) -> StoreResult<StoredObject> {
        self.reachable()?;
        let (kind, path) = self.locate(id).ok_or_else(|| StoreError::NotFound(id.to_string()))?;
        let bytes = fs::read(&path).map_err(io_error)?;
        verify(id, &bytes)?;
        let meta = fs::metadata(&path).map_err(io_error)?;
        Ok(StoredObject {
            object_id: id.to_string(),
            kind,
            bytes,
            created_at: mtime_secs(&meta),
        })
    }

    fn put(&self, kind: ObjectKind, name: &str, bytes: &[u8]) -> StoreResult<String> {
        self.reachable()?;
        validate_put(name, bytes)?;
        let id = object_id(name, bytes);
        if let Some((existing, _)) = self.locate(&id) {
            if existing != kind {
                return Err(StoreError::Rejected(format!("{id} already stored as {existing}")));
            }
            return Ok(id);
        }
        let dir = self.dir(kind);
        fs::create_dir_all(&dir).map_err(io_error)?;
        let tmp = dir.join(format!(".tmp-{id}"));
        let write = || -> io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(bytes)?;
            f.sync_all()?;
            fs::rename(&tmp, dir.join(&id))?;
            if let Ok(d) = fs::File::open(&dir) {
                let _ = d.sync_all();
            }
            Ok(())
        };
        write().map_err(|e| {
            let _ = fs::remove_file(&tmp);
            io_error(e)
        })?;
        Ok(id)
    }
}
