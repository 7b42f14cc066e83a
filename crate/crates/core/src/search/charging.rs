//! Contiguous-slot charging at a single station.

use crate::gtds::NodeId;
use crate::ledger::{LedgerError, Trt};
use crate::units::{Energy, Minutes, Slot, SlotRange};

/// Outcome of charging at a station after arriving.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChargeWindow {
    pub depart: Minutes,
    /// Charging slots plus overhead; zero when no charge was needed.
    pub charge_time: Minutes,
    pub wait: Minutes,
    pub slots: Option<SlotRange>,
    pub soc_d: Energy,
}

fn slots_needed(
    trt: &Trt,
    station: NodeId,
    soc_a: Energy,
    target: Energy,
    vehicle_kw: f64,
) -> Result<Option<i64>, LedgerError> {
    let gain = trt.free_gain(station, vehicle_kw)?;
    if !gain.is_positive() {
        return Ok(None);
    }
    Ok(Some((target - soc_a).div_ceil(gain)))
}

/// Highest unavailable slot in `range`, if any.
fn last_blocked(trt: &Trt, station: NodeId, range: SlotRange) -> Result<Option<Slot>, LedgerError> {
    for slot in range.iter().rev() {
        if !trt.is_available(station, slot)? {
            return Ok(Some(slot));
        }
    }
    Ok(None)
}

/// Earliest departure reaching `target` from `soc_a`, charging over the
/// first run of consecutive free slots that starts at or after arrival.
///
/// Returns `None` when no such run exists (zero gain, or the pessimistic
/// policy hides the slots past the window).
pub fn earliest_departure(
    trt: &Trt,
    station: NodeId,
    arrival: Minutes,
    soc_a: Energy,
    target: Energy,
    vehicle_kw: f64,
    overhead: Minutes,
) -> Result<Option<ChargeWindow>, LedgerError> {
    if soc_a >= target {
        trt.station_rate(station)?;
        return Ok(Some(ChargeWindow { depart: arrival, charge_time: 0, wait: 0, slots: None, soc_d: soc_a }));
    }
    let Some(k) = slots_needed(trt, station, soc_a, target, vehicle_kw)? else {
        return Ok(None);
    };
    let mut start = trt.slot_at_or_after(arrival).max(trt.window_start());
    loop {
        let range = SlotRange::new(start, start + k);
        if trt.policy() == crate::ledger::BeyondWindow::Pessimistic && range.end > trt.window_end() {
            return Ok(None);
        }
        match last_blocked(trt, station, range)? {
            Some(b) => start = b + 1,
            None => {
                let t = trt.slot_minutes();
                return Ok(Some(ChargeWindow {
                    depart: range.end * t + overhead,
                    charge_time: k * t + overhead,
                    wait: start * t - arrival,
                    slots: Some(range),
                    soc_d: target,
                }));
            }
        }
    }
}

/// Latest arrival at `station` from which charging `soc_a` up to `target`
/// still departs by `deadline`.
pub fn latest_arrival(
    trt: &Trt,
    station: NodeId,
    soc_a: Energy,
    target: Energy,
    deadline: Minutes,
    vehicle_kw: f64,
    overhead: Minutes,
) -> Result<Option<Minutes>, LedgerError> {
    if soc_a >= target {
        trt.station_rate(station)?;
        return Ok(Some(deadline));
    }
    let Some(k) = slots_needed(trt, station, soc_a, target, vehicle_kw)? else {
        return Ok(None);
    };
    let t = trt.slot_minutes();
    let mut start = (deadline - overhead).div_euclid(t) - k;
    while start >= trt.window_start() {
        match last_blocked(trt, station, SlotRange::new(start, start + k))? {
            Some(b) => start = b - k,
            None => return Ok(Some(start * t)),
        }
    }
    Ok(None)
}
