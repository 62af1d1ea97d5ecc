use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use parkscan_core::LotConfig;

use crate::model::{
    parse_bits, replay, validate_token, Action, LedgerEvent, Occupancy, ServiceError, SlotState,
};

type Result<T> = std::result::Result<T, ServiceError>;

/// Everything readers see, swapped atomically as a whole.
#[derive(Debug)]
pub(crate) struct Snapshot {
    pub slots: Vec<SlotState>,
    pub bit_string: Option<String>,
    pub annotated: Option<Arc<Vec<u8>>>,
}

#[derive(Debug)]
struct Files {
    ledger: File,
    report: File,
    annotated: PathBuf,
    fsync: bool,
}

impl Files {
    fn append(file: &mut File, line: &str, fsync: bool) -> io::Result<()> {
        file.write_all(line.as_bytes())?;
        if fsync {
            file.sync_data()?;
        }
        Ok(())
    }
}

#[derive(Debug)]
struct Writer {
    files: Option<Files>,
    events: Vec<LedgerEvent>,
    /// Last timestamp handed out; keeps the lot's times non-decreasing.
    clock: u64,
}

impl Writer {
    fn tick(&mut self) -> u64 {
        self.clock = self.clock.max(now_secs());
        self.clock
    }
}

/// One lot: a read snapshot plus a single serialized writer. Every mutation
/// is made durable before the new snapshot becomes visible.
#[derive(Debug)]
pub(crate) struct Lot {
    pub config: LotConfig,
    snapshot: RwLock<Arc<Snapshot>>,
    writer: Mutex<Writer>,
}

pub(crate) fn now_secs() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn read_lines(path: &Path) -> io::Result<Vec<String>> {
    let text = match fs::read(path) {
        Ok(b) => String::from_utf8_lossy(&b).into_owned(),
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    // a missing final newline marks a torn write
    let complete = text.rfind('\n').map_or(0, |i| i + 1);
    Ok(text[..complete].lines().map(str::to_owned).collect())
}

/// Opens for appending, cutting a torn final record.
fn open_log(path: &Path) -> io::Result<File> {
    let len = fs::read(path).map(|b| b.iter().rposition(|&c| c == b'\n').map_or(0, |i| i + 1)).unwrap_or(0);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    if file.metadata()?.len() != len as u64 {
        file.set_len(len as u64)?;
    }
    Ok(file)
}

impl Lot {
    pub fn new(config: LotConfig, data_dir: Option<&Path>, fsync: bool) -> Result<Self> {
        let n = config.slot_count();
        let mut slots: Vec<SlotState> = config
            .slots_gps
            .iter()
            .enumerate()
            .map(|(index, &gps)| SlotState {
                index,
                occupancy: Occupancy::Vacant,
                reserved: false,
                reserved_by: String::new(),
                gps,
                updated_at: 0,
            })
            .collect();
        let mut bit_string = None;
        let mut annotated = None;
        let mut events = Vec::new();
        let mut clock = 0;
        let files = match data_dir {
            None => None,
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let id = &config.lot_id;
                let ledger_path = dir.join(format!("{id}.ledger"));
                let report_path = dir.join(format!("{id}.report"));
                let annotated_path = dir.join(format!("{id}.annotated"));

                for line in read_lines(&ledger_path)? {
                    match LedgerEvent::parse(&line) {
                        Ok(e) => events.push(e),
                        Err(msg) => log::warn!("{}: {msg}", ledger_path.display()),
                    }
                }
                if let Some(last) = read_lines(&report_path)?.last() {
                    match last.split_once('\t').map(|(b, t)| (parse_bits(b, n), t.parse::<u64>())) {
                        Some((Ok(occ), Ok(t))) => {
                            for (s, o) in slots.iter_mut().zip(occ) {
                                s.occupancy = o;
                                s.updated_at = t;
                            }
                            bit_string = last.split_once('\t').map(|(b, _)| b.to_string());
                            clock = t;
                        }
                        _ => log::warn!("{}: ignoring malformed report {last:?}", report_path.display()),
                    }
                }
                match fs::read(&annotated_path) {
                    Ok(b) => annotated = Some(Arc::new(b)),
                    Err(e) if e.kind() == io::ErrorKind::NotFound => {}
                    Err(e) => return Err(e.into()),
                }
                Some(Files {
                    ledger: open_log(&ledger_path)?,
                    report: open_log(&report_path)?,
                    annotated: annotated_path,
                    fsync,
                })
            }
        };

        for (slot, holder) in slots.iter_mut().zip(replay(&events, n)) {
            slot.reserved = holder.is_some();
            slot.reserved_by = holder.unwrap_or_default();
        }
        for e in &events {
            if let Some(s) = slots.get_mut(e.slot) {
                s.updated_at = s.updated_at.max(e.timestamp);
            }
            clock = clock.max(e.timestamp);
        }

        Ok(Self {
            config,
            snapshot: RwLock::new(Arc::new(Snapshot {
                slots,
                bit_string,
                annotated,
            })),
            writer: Mutex::new(Writer { files, events, clock }),
        })
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    pub fn events(&self) -> Vec<LedgerEvent> {
        self.writer.lock().expect("writer lock").events.clone()
    }

    fn publish(&self, next: Snapshot) {
        *self.snapshot.write().expect("snapshot lock") = Arc::new(next);
    }

    fn slot_index(&self, n: usize) -> Result<usize> {
        if n < self.config.slot_count() {
            Ok(n)
        } else {
            Err(ServiceError::UnknownSlot(n))
        }
    }

    /// Appends events durably, then publishes slots with them applied.
    fn commit(&self, w: &mut Writer, base: &Snapshot, events: Vec<LedgerEvent>) -> Result<Vec<SlotState>> {
        if let Some(f) = &mut w.files {
            let lines: String = events.iter().map(LedgerEvent::to_line).collect();
            Files::append(&mut f.ledger, &lines, f.fsync)?;
        }
        let mut slots = base.slots.clone();
        for e in &events {
            let s = &mut slots[e.slot];
            match e.action {
                Action::Reserve => {
                    s.reserved = true;
                    s.reserved_by = e.client.clone();
                }
                Action::Release => {
                    s.reserved = false;
                    s.reserved_by.clear();
                }
            }
            s.updated_at = s.updated_at.max(e.timestamp);
        }
        w.events.extend(events);
        self.publish(Snapshot {
            slots: slots.clone(),
            bit_string: base.bit_string.clone(),
            annotated: base.annotated.clone(),
        });
        Ok(slots)
    }

    pub fn ingest(&self, bits: &str) -> Result<Vec<SlotState>> {
        let occupancy = parse_bits(bits, self.config.slot_count())?;
        let mut w = self.writer.lock().expect("writer lock");
        let ts = w.tick();
        if let Some(f) = &mut w.files {
            Files::append(&mut f.report, &format!("{bits}\t{ts}\n"), f.fsync)?;
        }
        let base = self.snapshot();
        let mut slots = base.slots.clone();
        for (s, o) in slots.iter_mut().zip(occupancy) {
            s.occupancy = o;
            s.updated_at = s.updated_at.max(ts);
        }
        self.publish(Snapshot {
            slots: slots.clone(),
            bit_string: Some(bits.to_string()),
            annotated: base.annotated.clone(),
        });
        Ok(slots)
    }

    pub fn reserve(&self, n: usize, client: &str) -> Result<SlotState> {
        validate_token(client)?;
        let n = self.slot_index(n)?;
        let mut w = self.writer.lock().expect("writer lock");
        let base = self.snapshot();
        let slot = &base.slots[n];
        if slot.reserved {
            return Err(ServiceError::AlreadyReserved(n));
        }
        if slot.occupancy == Occupancy::Occupied {
            return Err(ServiceError::Occupied(n));
        }
        let timestamp = w.tick();
        let event = LedgerEvent {
            slot: n,
            action: Action::Reserve,
            client: client.to_string(),
            timestamp,
        };
        Ok(self.commit(&mut w, &base, vec![event])?.swap_remove(n))
    }

    /// Reserves every vacant, unreserved slot; returns their indices.
    pub fn reserve_all(&self, client: &str) -> Result<Vec<usize>> {
        validate_token(client)?;
        let mut w = self.writer.lock().expect("writer lock");
        let base = self.snapshot();
        let eligible: Vec<usize> = base
            .slots
            .iter()
            .filter(|s| !s.reserved && s.occupancy == Occupancy::Vacant)
            .map(|s| s.index)
            .collect();
        if eligible.is_empty() {
            return Ok(eligible);
        }
        let timestamp = w.tick();
        let events = eligible
            .iter()
            .map(|&slot| LedgerEvent {
                slot,
                action: Action::Reserve,
                client: client.to_string(),
                timestamp,
            })
            .collect();
        self.commit(&mut w, &base, events)?;
        Ok(eligible)
    }

    pub fn release(&self, n: usize, client: &str) -> Result<SlotState> {
        validate_token(client)?;
        let n = self.slot_index(n)?;
        let mut w = self.writer.lock().expect("writer lock");
        let base = self.snapshot();
        let slot = &base.slots[n];
        if !slot.reserved {
            return Err(ServiceError::NotReserved(n));
        }
        if slot.reserved_by != client {
            return Err(ServiceError::Forbidden(n));
        }
        let timestamp = w.tick();
        let event = LedgerEvent {
            slot: n,
            action: Action::Release,
            client: client.to_string(),
            timestamp,
        };
        Ok(self.commit(&mut w, &base, vec![event])?.swap_remove(n))
    }

    pub fn set_annotated(&self, bytes: Vec<u8>) -> Result<()> {
        let w = self.writer.lock().expect("writer lock");
        if let Some(f) = &w.files {
            let tmp = f.annotated.with_extension("annotated.tmp");
            let mut file = File::create(&tmp)?;
            file.write_all(&bytes)?;
            if f.fsync {
                file.sync_all()?;
            }
            fs::rename(&tmp, &f.annotated)?;
        }
        let base = self.snapshot();
        self.publish(Snapshot {
            slots: base.slots.clone(),
            bit_string: base.bit_string.clone(),
            annotated: Some(Arc::new(bytes)),
        });
        Ok(())
    }

    pub fn slot(&self, n: usize) -> Result<SlotState> {
        let n = self.slot_index(n)?;
        Ok(self.snapshot().slots[n].clone())
    }
}
