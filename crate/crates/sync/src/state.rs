use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::object::now_secs;

/// Which source images have been published. Backed by an append-only file
/// of `<object_id>\t<unix_seconds>\n` records, replayed on open.
#[derive(Debug)]
pub struct SyncState {
    processed: BTreeSet<String>,
    pub last_poll: Option<u64>,
    log: Option<(PathBuf, File)>,
}

impl SyncState {
    /// State that lives only in memory.
    pub fn in_memory() -> Self {
        Self {
            processed: BTreeSet::new(),
            last_poll: None,
            log: None,
        }
    }

    /// Replays the state file, creating it if missing. A torn final record
    /// (no trailing newline) is discarded and cut from the file.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let text = match fs::read(&path) {
            Ok(b) => String::from_utf8_lossy(&b).into_owned(),
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(e),
        };
        let complete = text.rfind('\n').map_or(0, |i| i + 1);
        let mut processed = BTreeSet::new();
        for line in text[..complete].lines() {
            match line.split_once('\t') {
                Some((id, secs)) if !id.is_empty() && secs.parse::<u64>().is_ok() => {
                    processed.insert(id.to_string());
                }
                _ => log::warn!("{}: skipping malformed record {line:?}", path.display()),
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        if complete < text.len() {
            file.set_len(complete as u64)?;
        }
        Ok(Self {
            processed,
            last_poll: None,
            log: Some((path, file)),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.log.as_ref().map(|(p, _)| p.as_path())
    }

    pub fn is_processed(&self, id: &str) -> bool {
        self.processed.contains(id)
    }

    pub fn processed_ids(&self) -> &BTreeSet<String> {
        &self.processed
    }

    /// Records `id` as processed, durably when file backed. Marking twice is
    /// a no-op.
    pub fn mark_processed(&mut self, id: &str) -> io::Result<()> {
        if self.processed.contains(id) {
            return Ok(());
        }
        if let Some((_, file)) = &mut self.log {
            file.write_all(format!("{id}\t{}\n", now_secs()).as_bytes())?;
            file.sync_data()?;
        }
        self.processed.insert(id.to_string());
        Ok(())
    }
}
