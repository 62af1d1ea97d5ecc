//! Per-slot occupancy merged with client reservations, served as a JSON API.
//!
//! Occupancy comes from detector bit strings; reservations live in an
//! append-only ledger whose replay defines who holds which slot. Each lot
//! has one serialized writer, and readers see whole snapshots.

pub mod api;
mod lot;
pub mod model;
mod service;

pub use api::{router, serve, serve_until, ApiOptions, ErrorBody, LotSummary, ReportBody, ReserveAllBody};
pub use model::{
    navigation_url, parse_bits, replay, validate_token, Action, LedgerEvent, Navigation, Occupancy, ServiceError,
    SlotState,
};
pub use service::SlotService;
