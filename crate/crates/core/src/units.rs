//! Fixed-point quantities shared by every module.
//!
//! Energy is held in integer micro-kWh so that SoC comparisons, bucket
//! matching and slot-gain accumulation are exact. Time is whole minutes.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Minutes since the simulation epoch (or a duration in minutes).
pub type Minutes = i64;

/// Index of a timeslot: slot `s` covers `[s * len, (s + 1) * len)` minutes.
pub type Slot = i64;

const MICRO: f64 = 1_000_000.0;

/// An amount of energy in micro-kWh. One abstract "energy unit" of the
/// worked examples is one kWh.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Energy(pub i64);

impl Energy {
    pub const ZERO: Energy = Energy(0);

    pub fn from_kwh(kwh: f64) -> Self {
        Energy((kwh * MICRO).round() as i64)
    }

    pub fn kwh(self) -> f64 {
        self.0 as f64 / MICRO
    }

    pub fn micro(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> Self {
        Energy(self.0.abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Number of `step`s needed to cover `self`, rounding up. `step` must be positive.
    pub fn div_ceil(self, step: Energy) -> i64 {
        debug_assert!(step.0 > 0);
        if self.0 <= 0 {
            0
        } else {
            (self.0 + step.0 - 1) / step.0
        }
    }

    /// Multiply by a real factor, rounding to the nearest micro-kWh.
    pub fn scale(self, factor: f64) -> Self {
        Energy((self.0 as f64 * factor).round() as i64)
    }
}

impl fmt::Debug for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}kWh", self.kwh())
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kwh())
    }
}

impl Add for Energy {
    type Output = Energy;
    fn add(self, rhs: Energy) -> Energy {
        Energy(self.0 + rhs.0)
    }
}

impl AddAssign for Energy {
    fn add_assign(&mut self, rhs: Energy) {
        self.0 += rhs.0;
    }
}

impl Sub for Energy {
    type Output = Energy;
    fn sub(self, rhs: Energy) -> Energy {
        Energy(self.0 - rhs.0)
    }
}

impl SubAssign for Energy {
    fn sub_assign(&mut self, rhs: Energy) {
        self.0 -= rhs.0;
    }
}

impl Neg for Energy {
    type Output = Energy;
    fn neg(self) -> Energy {
        Energy(-self.0)
    }
}

impl Mul<i64> for Energy {
    type Output = Energy;
    fn mul(self, rhs: i64) -> Energy {
        Energy(self.0 * rhs)
    }
}

impl Sum for Energy {
    fn sum<I: Iterator<Item = Energy>>(iter: I) -> Energy {
        iter.fold(Energy::ZERO, |a, b| a + b)
    }
}

/// Half-open range of contiguous slots `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SlotRange {
    pub start: Slot,
    pub end: Slot,
}

impl SlotRange {
    pub fn new(start: Slot, end: Slot) -> Self {
        SlotRange { start, end }
    }

    /// Inclusive constructor, matching how timeslot sets are usually written.
    pub fn inclusive(first: Slot, last: Slot) -> Self {
        SlotRange { start: first, end: last + 1 }
    }

    pub fn len(&self) -> i64 {
        (self.end - self.start).max(0)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn last(&self) -> Slot {
        self.end - 1
    }

    pub fn contains(&self, slot: Slot) -> bool {
        slot >= self.start && slot < self.end
    }

    pub fn overlaps(&self, other: &SlotRange) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn iter(&self) -> std::ops::Range<Slot> {
        self.start..self.end
    }
}
