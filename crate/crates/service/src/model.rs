use std::fmt;
use std::str::FromStr;

use parkscan_core::GpsPoint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Occupancy {
    Vacant,
    Occupied,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotState {
    pub index: usize,
    pub occupancy: Occupancy,
    pub reserved: bool,
    /// Client token holding the reservation; empty when not reserved.
    pub reserved_by: String,
    pub gps: GpsPoint,
    /// Unix seconds of the last change to this slot.
    pub updated_at: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Reserve,
    Release,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Reserve => "reserve",
            Action::Release => "release",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Action {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reserve" => Ok(Action::Reserve),
            "release" => Ok(Action::Release),
            other => Err(format!("unknown action {other:?}")),
        }
    }
}

/// One ledger record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEvent {
    pub slot: usize,
    pub action: Action,
    pub client: String,
    pub timestamp: u64,
}

impl LedgerEvent {
    /// `<slot>\t<action>\t<client>\t<unix_seconds>`
    pub fn to_line(&self) -> String {
        format!("{}\t{}\t{}\t{}\n", self.slot, self.action, self.client, self.timestamp)
    }

    pub fn parse(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split('\t').collect();
        let [slot, action, client, ts] = fields[..] else {
            return Err(format!("expected 4 fields in {line:?}"));
        };
        Ok(Self {
            slot: slot.parse().map_err(|_| format!("bad slot in {line:?}"))?,
            action: action.parse()?,
            client: client.to_string(),
            timestamp: ts.parse().map_err(|_| format!("bad timestamp in {line:?}"))?,
        })
    }
}

/// Reservation holder per slot after applying `events` from an empty lot.
/// Events that would not have been accepted live are ignored.
pub fn replay(events: &[LedgerEvent], slot_count: usize) -> Vec<Option<String>> {
    let mut held: Vec<Option<String>> = vec![None; slot_count];
    for e in events {
        let Some(slot) = held.get_mut(e.slot) else {
            continue;
        };
        match e.action {
            Action::Reserve if slot.is_none() => *slot = Some(e.client.clone()),
            Action::Release if slot.as_deref() == Some(e.client.as_str()) => *slot = None,
            _ => {}
        }
    }
    held
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Navigation {
    pub lat: f64,
    pub lon: f64,
    pub url: String,
}

impl Navigation {
    pub fn to(gps: GpsPoint) -> Self {
        Self {
            lat: gps.lat,
            lon: gps.lon,
            url: navigation_url(gps),
        }
    }
}

pub fn navigation_url(gps: GpsPoint) -> String {
    format!("https://www.google.com/maps/dir/?api=1&destination={:.6},{:.6}", gps.lat, gps.lon)
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown lot {0:?}")]
    UnknownLot(String),
    #[error("lot has no slot {0}")]
    UnknownSlot(usize),
    #[error("slot {0} is already reserved")]
    AlreadyReserved(usize),
    #[error("slot {0} is occupied")]
    Occupied(usize),
    #[error("slot {0} is not reserved")]
    NotReserved(usize),
    #[error("slot {0} is reserved by another client")]
    Forbidden(usize),
    #[error("bit string has {got} slots, lot has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bit string must contain only 0 and 1")]
    BadBitString,
    #[error("invalid client token")]
    BadToken,
    #[error("no annotated image yet")]
    NoImage,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("storage: {0}")]
    Io(#[from] std::io::Error),
}

impl ServiceError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownLot(_) => "unknown_lot",
            ServiceError::UnknownSlot(_) => "unknown_slot",
            ServiceError::AlreadyReserved(_) => "already_reserved",
            ServiceError::Occupied(_) => "occupied",
            ServiceError::NotReserved(_) => "not_reserved",
            ServiceError::Forbidden(_) => "forbidden",
            ServiceError::LengthMismatch { .. } => "length_mismatch",
            ServiceError::BadBitString => "bad_bit_string",
            ServiceError::BadToken => "bad_token",
            ServiceError::NoImage => "no_image",
            ServiceError::Config(_) => "config",
            ServiceError::Io(_) => "storage",
        }
    }
}

/// Tokens end up in tab-separated ledger lines, so they are limited to
/// visible ASCII without whitespace.
pub fn validate_token(token: &str) -> Result<(), ServiceError> {
    if token.is_empty() || token.len() > 256 || !token.bytes().all(|b| b.is_ascii_graphic()) {
        return Err(ServiceError::BadToken);
    }
    Ok(())
}

pub fn parse_bits(bits: &str, slot_count: usize) -> Result<Vec<Occupancy>, ServiceError> {
    if !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(ServiceError::BadBitString);
    }
    if bits.len() != slot_count {
        return Err(ServiceError::LengthMismatch {
            expected: slot_count,
            got: bits.len(),
        });
    }
    Ok(bits
        .bytes()
        .map(|b| if b == b'1' { Occupancy::Occupied } else { Occupancy::Vacant })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn navigation_urls() {
        let url = navigation_url(GpsPoint { lat: 12.840715, lon: 80.1534 });
        assert!(url.ends_with("destination=12.840715,80.153400"));
        assert!(navigation_url(GpsPoint { lat: 1.23456789, lon: 0.0 }).ends_with("destination=1.234568,0.000000"));
        assert!(navigation_url(GpsPoint { lat: 40.0, lon: -73.9857 }).ends_with("destination=40.000000,-73.985700"));
    }

    #[test]
    fn ledger_lines_round_trip() {
        let e = LedgerEvent {
            slot: 3,
            action: Action::Release,
            client: "tok-1".into(),
            timestamp: 1700000000,
        };
        assert_eq!(e.to_line(), "3\trelease\ttok-1\t1700000000\n");
        assert_eq!(LedgerEvent::parse(e.to_line().trim_end()).unwrap(), e);
        assert!(LedgerEvent::parse("3\treserve\tx").is_err());
        assert!(LedgerEvent::parse("a\treserve\tx\t1").is_err());
    }

    #[test]
    fn bits() {
        assert_eq!(parse_bits("0101", 4).unwrap()[1], Occupancy::Occupied);
        assert!(matches!(parse_bits("010", 4), Err(ServiceError::LengthMismatch { expected: 4, got: 3 })));
        assert!(matches!(parse_bits("01x1", 4), Err(ServiceError::BadBitString)));
    }

    #[test]
    fn tokens() {
        assert!(validate_token("abc-123").is_ok());
        for bad in ["", "a b", "tab\tx", "nl\n"] {
            assert!(validate_token(bad).is_err());
        }
    }
}
