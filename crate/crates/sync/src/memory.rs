use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use crate::object::{
    now_secs, object_id, validate_put, verify, ObjectKind, ObjectStore, StoreError, StoreResult, StoredObject,
};

/// In-process store for tests and embedding. It can be switched offline to
/// exercise retry paths, and payloads can be corrupted in place.
#[derive(Debug, Default)]
pub struct MemoryStore {
    objects: Mutex<BTreeMap<String, StoredObject>>,
    offline: AtomicBool,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_offline(&self, offline: bool) {
        self.offline.store(offline, Ordering::SeqCst);
    }

    pub fn len(&self) -> usize {
        self.objects.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flips one payload byte without changing the id.
    pub fn corrupt(&self, object_id: &str) -> bool {
        let mut objects = self.objects.lock().unwrap();
        match objects.get_mut(object_id).and_then(|o| o.bytes.first_mut()) {
            Some(b) => {
                *b ^= 0xff;
                true
            }
            None => false,
        }
    }

    fn online(&self) -> StoreResult<()> {
        if self.offline.load(Ordering::SeqCst) {
            Err(StoreError::Unavailable("memory store is offline".into()))
        } else {
            Ok(())
        }
    }
}

impl ObjectStore for MemoryStore {
    fn list(&self, kind: ObjectKind) -> StoreResult<Vec<String>> {
        self.online()?;
        let objects = self.objects.lock().unwrap();
        let mut found: Vec<(u64, &String)> = objects
            .values()
            .filter(|o| o.kind == kind)
            .map(|o| (o.created_at, &o.object_id))
            .collect();
        found.sort();
        Ok(found.into_iter().map(|(_, id)| id.clone()).collect())
    }

    fn fetch(&self, id: &str) -> StoreResult<StoredObject> {
        self.online()?;
        let obj = self
            .objects
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))?;
        verify(id, &obj.bytes)?;
        Ok(obj)
    }

    fn put(&self, kind: ObjectKind, name: &str, bytes: &[u8]) -> StoreResult<String> {
        self.online()?;
        validate_put(name, bytes)?;
        let id = object_id(name, bytes);
        let mut objects = self.objects.lock().unwrap();
        if let Some(existing) = objects.get(&id) {
            if existing.kind != kind {
                return Err(StoreError::Rejected(format!("{id} already stored as {}", existing.kind)));
            }
            return Ok(id);
        }
        objects.insert(
            id.clone(),
            StoredObject {
                object_id: id.clone(),
                kind,
                bytes: bytes.to_vec(),
                created_at: now_secs(),
            },
        );
        Ok(id)
    }
}
