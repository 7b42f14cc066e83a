//! Time-dependent resource table: which station/timeslot pairs are reserved
//! and how much charge a vehicle can take from a free one.
//!
//! Each station serves one vehicle per slot. The table covers the sliding
//! window `[window_start, window_start + window_len)`; what lies beyond it is
//! governed by [`BeyondWindow`]. Slots before the window are in the past and
//! never available.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gtds::{Gtds, NodeId};
use crate::units::{Energy, Minutes, Slot, SlotRange};

pub type RequestId = u64;

#[derive(Debug, Error, PartialEq)]
pub enum LedgerError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown station {0}")]
    UnknownStation(NodeId),
    #[error("slot {slot} at station {station} is already held by request {holder}")]
    Conflict { station: NodeId, slot: Slot, holder: RequestId },
    #[error("slot {slot} lies outside the window starting at {window_start}")]
    OutsideWindow { slot: Slot, window_start: Slot },
    #[error("unknown or already released reservation token {0:?}")]
    UnknownToken(Token),
    #[error("window cannot move backwards from {from} to {to}")]
    BackwardWindow { from: Slot, to: Slot },
    #[error("ledger audit failed: {0}")]
    Audit(String),
    #[error("trt csv: {0}")]
    Csv(String),
}

/// What a search sees for slots past the end of the window.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeyondWindow {
    /// Unreserved with full gain.
    #[default]
    Optimistic,
    /// Unavailable.
    Pessimistic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotState {
    pub reserved: bool,
    pub holder: Option<RequestId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Token(pub u64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LedgerEvent {
    Reserve { token: Token, request: RequestId, parts: Vec<(NodeId, SlotRange)> },
    Release { token: Token },
    Advance { window_start: Slot },
}

#[derive(Clone, Debug)]
struct Column {
    rate_kw: f64,
    held: BTreeMap<Slot, (RequestId, Token)>,
}

/// Realised charging speed: the slower of vehicle and station.
pub fn effective_rate(vehicle_kw: f64, station_kw: f64) -> Result<f64, LedgerError> {
    for (what, v) in [("vehicle rate", vehicle_kw), ("station rate", station_kw)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(LedgerError::InvalidParameter(format!("{what} must be positive, got {v}")));
        }
    }
    Ok(vehicle_kw.min(station_kw))
}

/// Energy gained by charging at `rate_kw` for one slot.
pub fn slot_gain(rate_kw: f64, slot_minutes: Minutes) -> Result<Energy, LedgerError> {
    if !(rate_kw.is_finite() && rate_kw >= 0.0) {
        return Err(LedgerError::InvalidParameter(format!("rate must be non-negative, got {rate_kw}")));
    }
    if slot_minutes <= 0 {
        return Err(LedgerError::InvalidParameter(format!("slot length must be positive, got {slot_minutes}")));
    }
    Ok(Energy::from_kwh(rate_kw * slot_minutes as f64 / 60.0))
}

#[derive(Clone, Debug)]
pub struct Trt {
    slot_minutes: Minutes,
    window_start: Slot,
    window_len: i64,
    policy: BeyondWindow,
    stations: BTreeMap<NodeId, Column>,
    holdings: BTreeMap<Token, Vec<(NodeId, SlotRange)>>,
    next_token: u64,
    log: Vec<LedgerEvent>,
}

impl Trt {
    pub fn new(gtds: &Gtds, slot_minutes: Minutes, window_len: i64) -> Result<Trt, LedgerError> {
        if slot_minutes <= 0 {
            return Err(LedgerError::InvalidParameter(format!("slot length must be positive, got {slot_minutes}")));
        }
        if window_len <= 0 {
            return Err(LedgerError::InvalidParameter(format!("window length must be positive, got {window_len}")));
        }
        let stations = gtds
            .stations()
            .map(|s| (s.id, Column { rate_kw: s.rate_kw.unwrap_or(0.0), held: BTreeMap::new() }))
            .collect();
        Ok(Trt {
            slot_minutes,
            window_start: 0,
            window_len,
            policy: BeyondWindow::default(),
            stations,
            holdings: BTreeMap::new(),
            next_token: 0,
            log: Vec::new(),
        })
    }

    pub fn with_policy(mut self, policy: BeyondWindow) -> Self {
        self.policy = policy;
        self
    }

    pub fn slot_minutes(&self) -> Minutes {
        self.slot_minutes
    }

    pub fn window_start(&self) -> Slot {
        self.window_start
    }

    pub fn window_len(&self) -> i64 {
        self.window_len
    }

    pub fn window_end(&self) -> Slot {
        self.window_start + self.window_len
    }

    pub fn policy(&self) -> BeyondWindow {
        self.policy
    }

    /// Slot containing minute `t`.
    pub fn slot_of(&self, t: Minutes) -> Slot {
        t.div_euclid(self.slot_minutes)
    }

    /// First slot boundary at or after minute `t`.
    pub fn slot_at_or_after(&self, t: Minutes) -> Slot {
        (t + self.slot_minutes - 1).div_euclid(self.slot_minutes)
    }

    pub fn slot_start(&self, slot: Slot) -> Minutes {
        slot * self.slot_minutes
    }

    fn column(&self, station: NodeId) -> Result<&Column, LedgerError> {
        self.stations.get(&station).ok_or(LedgerError::UnknownStation(station))
    }

    pub fn station_rate(&self, station: NodeId) -> Result<f64, LedgerError> {
        Ok(self.column(station)?.rate_kw)
    }

    /// Gain of one free slot at `station` for a vehicle charging at `vehicle_kw`.
    pub fn free_gain(&self, station: NodeId, vehicle_kw: f64) -> Result<Energy, LedgerError> {
        let rate = effective_rate(vehicle_kw, self.column(station)?.rate_kw)?;
        slot_gain(rate, self.slot_minutes)
    }

    pub fn is_available(&self, station: NodeId, slot: Slot) -> Result<bool, LedgerError> {
        let col = self.column(station)?;
        if slot < self.window_start {
            return Ok(false);
        }
        if slot >= self.window_end() {
            return Ok(self.policy == BeyondWindow::Optimistic);
        }
        Ok(!col.held.contains_key(&slot))
    }

    /// Charge obtainable in `slot` at `station`; zero when reserved.
    pub fn query_slot(&self, station: NodeId, slot: Slot, vehicle_kw: f64) -> Result<Energy, LedgerError> {
        let gain = self.free_gain(station, vehicle_kw)?;
        Ok(if self.is_available(station, slot)? { gain } else { Energy::ZERO })
    }

    pub fn slot_state(&self, station: NodeId, slot: Slot) -> Result<SlotState, LedgerError> {
        let holder = self.column(station)?.held.get(&slot).map(|(r, _)| *r);
        Ok(SlotState { reserved: holder.is_some(), holder })
    }

    /// Reserve one contiguous range.
    pub fn reserve(&mut self, request: RequestId, station: NodeId, slots: SlotRange) -> Result<Token, LedgerError> {
        self.reserve_all(request, &[(station, slots)])
    }

    /// Reserve several ranges atomically: on any conflict nothing is written.
    pub fn reserve_all(&mut self, request: RequestId, parts: &[(NodeId, SlotRange)]) -> Result<Token, LedgerError> {
        for (i, &(station, range)) in parts.iter().enumerate() {
            let col = self.column(station)?;
            if range.is_empty() {
                return Err(LedgerError::InvalidParameter(format!("empty slot range at {station}")));
            }
            for slot in range.iter() {
                if slot < self.window_start || slot >= self.window_end() {
                    return Err(LedgerError::OutsideWindow { slot, window_start: self.window_start });
                }
                if let Some(&(holder, _)) = col.held.get(&slot) {
                    return Err(LedgerError::Conflict { station, slot, holder });
                }
                // overlap between parts of the same request
                if parts[..i].iter().any(|(s, r)| *s == station && r.contains(slot)) {
                    return Err(LedgerError::Conflict { station, slot, holder: request });
                }
            }
        }
        let token = Token(self.next_token);
        self.next_token += 1;
        for &(station, range) in parts {
            let col = self.stations.get_mut(&station).expect("checked above");
            for slot in range.iter() {
                col.held.insert(slot, (request, token));
            }
        }
        self.holdings.insert(token, parts.to_vec());
        self.log.push(LedgerEvent::Reserve { token, request, parts: parts.to_vec() });
        Ok(token)
    }

    pub fn release(&mut self, token: Token) -> Result<(), LedgerError> {
        let parts = self.holdings.remove(&token).ok_or(LedgerError::UnknownToken(token))?;
        for (station, range) in parts {
            let col = self.stations.get_mut(&station).expect("reserved stations exist");
            for slot in range.iter() {
                if col.held.get(&slot).is_some_and(|&(_, t)| t == token) {
                    col.held.remove(&slot);
                }
            }
        }
        self.log.push(LedgerEvent::Release { token });
        Ok(())
    }

    /// Slide the window forward; slots before `new_start` are dropped.
    pub fn advance_window(&mut self, new_start: Slot) -> Result<(), LedgerError> {
        if new_start < self.window_start {
            return Err(LedgerError::BackwardWindow { from: self.window_start, to: new_start });
        }
        if new_start == self.window_start {
            return Ok(());
        }
        for col in self.stations.values_mut() {
            col.held = col.held.split_off(&new_start);
        }
        self.window_start = new_start;
        self.log.push(LedgerEvent::Advance { window_start: new_start });
        Ok(())
    }

    /// Same configuration, nothing reserved.
    pub fn all_free(&self) -> Trt {
        Trt {
            stations: self
                .stations
                .iter()
                .map(|(&id, c)| (id, Column { rate_kw: c.rate_kw, held: BTreeMap::new() }))
                .collect(),
            holdings: BTreeMap::new(),
            next_token: 0,
            log: Vec::new(),
            ..*self
        }
    }

    pub fn reservation_count(&self) -> usize {
        self.stations.values().map(|c| c.held.len()).sum()
    }

    /// Every reserved `(station, slot, holder)` in the window, ordered.
    pub fn reservations(&self) -> impl Iterator<Item = (NodeId, Slot, RequestId)> + '_ {
        self.stations.iter().flat_map(|(&s, col)| col.held.iter().map(move |(&slot, &(r, _))| (s, slot, r)))
    }

    pub fn log(&self) -> &[LedgerEvent] {
        &self.log
    }

    /// Equal visible state: window position and reservation holders.
    pub fn table_eq(&self, other: &Trt) -> bool {
        self.window_start == other.window_start
            && self.window_len == other.window_len
            && self.slot_minutes == other.slot_minutes
            && self.reservations().eq(other.reservations())
    }

    /// Replay the event log from an empty table, checking that no slot was
    /// ever held twice and that the replay ends in the current state.
    pub fn audit(&self) -> Result<(), LedgerError> {
        let mut held: BTreeMap<(NodeId, Slot), RequestId> = BTreeMap::new();
        let mut live: BTreeMap<Token, Vec<(NodeId, SlotRange)>> = BTreeMap::new();
        let mut window_start = Slot::MIN;
        for event in &self.log {
            match event {
                LedgerEvent::Reserve { token, request, parts } => {
                    for &(station, range) in parts {
                        for slot in range.iter() {
                            if slot < window_start {
                                continue;
                            }
                            if let Some(prev) = held.insert((station, slot), *request) {
                                return Err(LedgerError::Audit(format!(
                                    "slot {slot} at {station} double-booked by {prev} and {request}"
                                )));
                            }
                        }
                    }
                    live.insert(*token, parts.clone());
                }
                LedgerEvent::Release { token } => {
                    let parts = live
                        .remove(token)
                        .ok_or_else(|| LedgerError::Audit(format!("release of unknown token {token:?}")))?;
                    for (station, range) in parts {
                        for slot in range.iter() {
                            held.remove(&(station, slot));
                        }
                    }
                }
                LedgerEvent::Advance { window_start: ws } => {
                    window_start = *ws;
                    held.retain(|&(_, slot), _| slot >= *ws);
                }
            }
        }
        let replayed: Vec<_> = held.iter().map(|(&(s, slot), &r)| (s, slot, r)).collect();
        let current: Vec<_> = self.reservations().collect();
        if replayed != current {
            return Err(LedgerError::Audit("log replay does not reproduce the current table".into()));
        }
        Ok(())
    }

    /// Write `station_id,slot_index,reserved,holder` rows for every reserved
    /// slot, plus free rows for `[from, to)` when a range is given.
    pub fn write_csv<W: io::Write>(&self, gtds: &Gtds, out: W, range: Option<(Slot, Slot)>) -> Result<(), LedgerError> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| LedgerError::Csv(e.to_string());
        w.write_record(["station_id", "slot_index", "reserved", "holder"]).map_err(csv_err)?;
        for (&station, col) in &self.stations {
            let name = gtds.name(station);
            let slots: Vec<Slot> = match range {
                Some((from, to)) => {
                    let mut v: Vec<Slot> = (from..to).collect();
                    v.extend(col.held.keys().filter(|s| **s < from || **s >= to));
                    v.sort_unstable();
                    v
                }
                None => col.held.keys().copied().collect(),
            };
            for slot in slots {
                let (reserved, holder) = match col.held.get(&slot) {
                    Some((r, _)) if *r == RequestId::MAX => ("true", String::new()),
                    Some((r, _)) => ("true", r.to_string()),
                    None => ("false", String::new()),
                };
                w.write_record([name, &slot.to_string(), reserved, &holder]).map_err(csv_err)?;
            }
        }
        w.flush().map_err(|e| LedgerError::Csv(e.to_string()))
    }

    /// Load reservations from the CSV dump format; one token per row.
    pub fn read_csv<R: io::Read>(&mut self, gtds: &Gtds, input: R) -> Result<(), LedgerError> {
        let mut rdr = csv::Reader::from_reader(input);
        for rec in rdr.records() {
            let rec = rec.map_err(|e| LedgerError::Csv(e.to_string()))?;
            let field = |i: usize| rec.get(i).map(str::trim).unwrap_or("");
            if field(2) != "true" {
                continue;
            }
            let station = gtds.id_of(field(0)).map_err(|e| LedgerError::Csv(e.to_string()))?;
            let slot: Slot = field(1).parse().map_err(|_| LedgerError::Csv(format!("bad slot `{}`", field(1))))?;
            let holder: RequestId = if field(3).is_empty() {
                RequestId::MAX
            } else {
                field(3).parse().map_err(|_| LedgerError::Csv(format!("bad holder `{}`", field(3))))?
            };
            self.reserve(holder, station, SlotRange::new(slot, slot + 1))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gtds::{GraphParams, Point, StationSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_stations() -> Gtds {
        let st = |name: &str, x, rate| StationSpec { name: name.into(), pos: Point::new(x, 0.0), rate_kw: rate };
        Gtds::from_geometry(&[st("c1", 0.0, 36.0), st("c2", 10.0, 12.0)], &[], &GraphParams::default()).unwrap()
    }

    const C1: NodeId = NodeId(0);
    const C2: NodeId = NodeId(1);

    #[test]
    fn effective_rate_is_the_minimum() {
        assert_eq!(effective_rate(24.0, 36.0).unwrap(), 24.0);
        assert_eq!(effective_rate(24.0, 12.0).unwrap(), 12.0);
        assert_eq!(effective_rate(7.5, 7.5).unwrap(), 7.5);
        assert_eq!(effective_rate(36.0, 24.0).unwrap(), effective_rate(24.0, 36.0).unwrap());
        assert!(effective_rate(0.0, 10.0).is_err());
        assert!(effective_rate(10.0, -1.0).is_err());
    }

    #[test]
    fn slot_gain_examples() {
        assert_eq!(slot_gain(24.0, 5).unwrap(), Energy::from_kwh(2.0));
        assert_eq!(slot_gain(12.0, 5).unwrap(), Energy::from_kwh(1.0));
        assert_eq!(slot_gain(0.0, 5).unwrap(), Energy::ZERO);
        assert!(slot_gain(10.0, 0).is_err());
    }

    #[test]
    fn query_reserved_and_free() {
        let g = two_stations();
        let mut trt = Trt::new(&g, 5, 8).unwrap();
        trt.reserve(99, C2, SlotRange::inclusive(0, 2)).unwrap();
        for slot in 0..3 {
            assert_eq!(trt.query_slot(C2, slot, 24.0).unwrap(), Energy::ZERO);
        }
        assert_eq!(trt.query_slot(C2, 3, 24.0).unwrap(), Energy::from_kwh(1.0));
        assert_eq!(trt.query_slot(C1, 0, 24.0).unwrap(), Energy::from_kwh(2.0));
        // optimistic beyond the window
        assert_eq!(trt.query_slot(C1, 100, 24.0).unwrap(), Energy::from_kwh(2.0));
        let pessimistic = trt.clone().with_policy(BeyondWindow::Pessimistic);
        assert_eq!(pessimistic.query_slot(C1, 100, 24.0).unwrap(), Energy::ZERO);
        assert_eq!(trt.query_slot(NodeId(7), 0, 24.0), Err(LedgerError::UnknownStation(NodeId(7))));
    }

    #[test]
    fn reserve_release_round_trip() {
        let g = two_stations();
        let mut trt = Trt::new(&g, 5, 100).unwrap();
        let before = trt.clone();
        let token = trt.reserve(1, C1, SlotRange::inclusive(3, 4)).unwrap();
        assert_eq!(trt.query_slot(C1, 3, 24.0).unwrap(), Energy::ZERO);
        assert_eq!(trt.slot_state(C1, 4).unwrap(), SlotState { reserved: true, holder: Some(1) });
        trt.release(token).unwrap();
        assert_eq!(trt.query_slot(C1, 3, 24.0).unwrap(), Energy::from_kwh(2.0));
        assert!(trt.table_eq(&before));
        assert_eq!(trt.release(token), Err(LedgerError::UnknownToken(token)));
    }

    #[test]
    fn overlapping_reservation_conflicts() {
        let g = two_stations();
        let mut trt = Trt::new(&g, 5, 100).unwrap();
        trt.reserve(1, C1, SlotRange::inclusive(3, 4)).unwrap();
        let err = trt.reserve(2, C1, SlotRange::inclusive(4, 5)).unwrap_err();
        assert_eq!(err, LedgerError::Conflict { station: C1, slot: 4, holder: 1 });
        // the failed call wrote nothing
        assert_eq!(trt.query_slot(C1, 5, 24.0).unwrap(), Energy::from_kwh(2.0));
    }

    #[test]
    fn reserve_all_is_atomic() {
        let g = two_stations();
        let mut trt = Trt::new(&g, 5, 100).unwrap();
        trt.reserve(1, C2, SlotRange::inclusive(7, 7)).unwrap();
        let snapshot = trt.clone();
        let parts = [(C1, SlotRange::inclusive(1, 2)), (C2, SlotRange::inclusive(6, 8))];
        assert!(trt.reserve_all(2, &parts).is_err());
        assert!(trt.table_eq(&snapshot));
    }

    #[test]
    fn window_moves_forward_only() {
        let g = two_stations();
        let mut trt = Trt::new(&g, 5, 10).unwrap();
        trt.reserve(1, C1, SlotRange::inclusive(2, 3)).unwrap();
        trt.reserve(2, C1, SlotRange::inclusive(8, 9)).unwrap();
        let same = trt.clone();
        trt.advance_window(0).unwrap();
        assert!(trt.table_eq(&same));
        trt.advance_window(5).unwrap();
        assert!(!trt.slot_state(C1, 2).unwrap().reserved);
        assert_eq!(trt.query_slot(C1, 3, 24.0).unwrap(), Energy::ZERO, "past slots are unavailable");
        assert_eq!(trt.slot_state(C1, 8).unwrap().holder, Some(2));
        assert!(matches!(trt.advance_window(4), Err(LedgerError::BackwardWindow { .. })));
        assert!(matches!(trt.reserve(3, C1, SlotRange::inclusive(3, 3)), Err(LedgerError::OutsideWindow { .. })));
        trt.audit().unwrap();
    }

    #[test]
    fn random_reserve_release_pairs_restore_the_table() {
        let g = two_stations();
        let mut trt = Trt::new(&g, 5, 200).unwrap();
        trt.reserve(0, C1, SlotRange::inclusive(50, 60)).unwrap();
        let initial = trt.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut tokens = Vec::new();
        for req in 1..=1000u64 {
            let station = if rng.random_bool(0.5) { C1 } else { C2 };
            let start = rng.random_range(0..190);
            let len = rng.random_range(1..6);
            if let Ok(t) = trt.reserve(req, station, SlotRange::new(start, start + len)) {
                tokens.push(t);
            }
            if !tokens.is_empty() && rng.random_bool(0.5) {
                let t = tokens.swap_remove(rng.random_range(0..tokens.len()));
                trt.release(t).unwrap();
            }
        }
        for t in tokens {
            trt.release(t).unwrap();
        }
        assert!(trt.table_eq(&initial));
        trt.audit().unwrap();
    }

    #[test]
    fn interleaved_reserve_and_advance_match_a_log_model() {
        // independent model: a plain list of (station, slot, holder) intervals
        let g = two_stations();
        let mut trt = Trt::new(&g, 5, 40).unwrap();
        let mut model: Vec<(NodeId, Slot, RequestId)> = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut now = 0;
        for req in 0..500u64 {
            if rng.random_bool(0.2) {
                now += rng.random_range(0..4);
                trt.advance_window(now).unwrap();
                model.retain(|&(_, s, _)| s >= now);
            }
            let station = if rng.random_bool(0.5) { C1 } else { C2 };
            let start = now + rng.random_range(0..35);
            let len = rng.random_range(1..4);
            let range = SlotRange::new(start, start + len);
            let clash = model.iter().any(|&(s, slot, _)| s == station && range.contains(slot));
            let in_window = range.end <= now + 40;
            let result = trt.reserve(req, station, range);
            assert_eq!(result.is_ok(), !clash && in_window, "request {req}");
            if result.is_ok() {
                model.extend(range.iter().map(|slot| (station, slot, req)));
            }
            for probe in now..now + 40 {
                for st in [C1, C2] {
                    let expect = model.iter().find(|&&(s, slot, _)| s == st && slot == probe).map(|m| m.2);
                    assert_eq!(trt.slot_state(st, probe).unwrap().holder, expect);
                }
            }
        }
        trt.audit().unwrap();
    }

    #[test]
    fn csv_dump_round_trip() {
        let g = two_stations();
        let mut trt = Trt::new(&g, 5, 100).unwrap();
        trt.reserve(4, C2, SlotRange::inclusive(0, 2)).unwrap();
        trt.reserve(5, C1, SlotRange::inclusive(3, 3)).unwrap();
        let mut buf = Vec::new();
        trt.write_csv(&g, &mut buf, None).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("station_id,slot_index,reserved,holder\n"));
        assert!(text.contains("c2,1,true,4"));
        let mut loaded = Trt::new(&g, 5, 100).unwrap();
        loaded.read_csv(&g, buf.as_slice()).unwrap();
        assert!(loaded.table_eq(&trt));

        let mut full = Vec::new();
        trt.write_csv(&g, &mut full, Some((0, 4))).unwrap();
        assert_eq!(String::from_utf8(full).unwrap().lines().count(), 1 + 8);
    }

    #[test]
    fn adding_reservations_never_raises_a_query() {
        let g = two_stations();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut trt = Trt::new(&g, 5, 60).unwrap();
        for req in 0..200 {
            let before = trt.clone();
            let station = if rng.random_bool(0.5) { C1 } else { C2 };
            let start = rng.random_range(0..58);
            let _ = trt.reserve(req, station, SlotRange::new(start, start + 2));
            for slot in 0..70 {
                for st in [C1, C2] {
                    assert!(trt.query_slot(st, slot, 50.0).unwrap() <= before.query_slot(st, slot, 50.0).unwrap());
                }
            }
        }
    }
}
