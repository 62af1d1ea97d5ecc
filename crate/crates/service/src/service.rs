use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parkscan_core::LotConfig;

use crate::lot::Lot;
use crate::model::{LedgerEvent, Navigation, ServiceError, SlotState};

type Result<T> = std::result::Result<T, ServiceError>;

/// Slot state for a set of lots: occupancy from detector reports merged
/// with client reservations.
#[derive(Debug)]
pub struct SlotService {
    lots: BTreeMap<String, Lot>,
    data_dir: Option<PathBuf>,
}

impl SlotService {
    /// A service whose state is lost on drop.
    pub fn in_memory(configs: Vec<LotConfig>) -> Result<Self> {
        Self::build(configs, None, false)
    }

    /// A service persisted under `data_dir`, restoring any earlier state.
    /// With `fsync`, every mutation reaches stable storage before it is
    /// acknowledged.
    pub fn open(configs: Vec<LotConfig>, data_dir: impl AsRef<Path>, fsync: bool) -> Result<Self> {
        Self::build(configs, Some(data_dir.as_ref()), fsync)
    }

    fn build(configs: Vec<LotConfig>, data_dir: Option<&Path>, fsync: bool) -> Result<Self> {
        let mut lots = BTreeMap::new();
        for cfg in configs {
            cfg.validate().map_err(|e| ServiceError::Config(e.to_string()))?;
            let id = cfg.lot_id.clone();
            if lots.contains_key(&id) {
                return Err(ServiceError::Config(format!("duplicate lot id {id:?}")));
            }
            lots.insert(id, Lot::new(cfg, data_dir, fsync)?);
        }
        Ok(Self {
            lots,
            data_dir: data_dir.map(Path::to_path_buf),
        })
    }

    fn lot(&self, id: &str) -> Result<&Lot> {
        self.lots.get(id).ok_or_else(|| ServiceError::UnknownLot(id.to_string()))
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.data_dir.as_deref()
    }

    pub fn lot_ids(&self) -> Vec<String> {
        self.lots.keys().cloned().collect()
    }

    pub fn config(&self, lot: &str) -> Result<&LotConfig> {
        Ok(&self.lot(lot)?.config)
    }

    /// All slots, ordered by index.
    pub fn slots(&self, lot: &str) -> Result<Vec<SlotState>> {
        Ok(self.lot(lot)?.snapshot().slots.clone())
    }

    pub fn slot(&self, lot: &str, n: usize) -> Result<SlotState> {
        self.lot(lot)?.slot(n)
    }

    /// Latest ingested bit string, if any.
    pub fn bit_string(&self, lot: &str) -> Result<Option<String>> {
        Ok(self.lot(lot)?.snapshot().bit_string.clone())
    }

    /// Replaces occupancy from a detector bit string. Reservations are kept,
    /// even on slots that turn occupied.
    pub fn ingest_report(&self, lot: &str, bit_string: &str) -> Result<Vec<SlotState>> {
        self.lot(lot)?.ingest(bit_string)
    }

    /// Reserves a vacant, unreserved slot for `client`.
    pub fn reserve(&self, lot: &str, n: usize, client: &str) -> Result<SlotState> {
        self.lot(lot)?.reserve(n, client)
    }

    /// Reserves every eligible slot at once and returns their indices.
    pub fn reserve_all(&self, lot: &str, client: &str) -> Result<Vec<usize>> {
        self.lot(lot)?.reserve_all(client)
    }

    pub fn release(&self, lot: &str, n: usize, client: &str) -> Result<SlotState> {
        self.lot(lot)?.release(n, client)
    }

    pub fn navigation(&self, lot: &str, n: usize) -> Result<Navigation> {
        Ok(Navigation::to(self.lot(lot)?.slot(n)?.gps))
    }

    pub fn set_annotated(&self, lot: &str, bytes: Vec<u8>) -> Result<()> {
        self.lot(lot)?.set_annotated(bytes)
    }

    pub fn annotated(&self, lot: &str) -> Result<Arc<Vec<u8>>> {
        self.lot(lot)?.snapshot().annotated.clone().ok_or(ServiceError::NoImage)
    }

    /// Reservation events in commit order.
    pub fn ledger(&self, lot: &str) -> Result<Vec<LedgerEvent>> {
        Ok(self.lot(lot)?.events())
    }
}
