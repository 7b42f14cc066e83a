use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SearchError;
use crate::gtds::{Gtds, NodeId};
use crate::ledger::RequestId;
use crate::units::{Energy, Minutes};

/// One EV trip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutingRequest {
    pub id: RequestId,
    pub origin: NodeId,
    pub destination: NodeId,
    pub depart: Minutes,
    pub soc: Energy,
    pub battery: Energy,
    /// Vehicle charging rate Γ in kW.
    pub vehicle_rate_kw: f64,
}

impl RoutingRequest {
    pub fn validate(&self, gtds: &Gtds) -> Result<(), SearchError> {
        let bad = |msg: String| Err(SearchError::InvalidRequest(self.id, msg));
        for node in [self.origin, self.destination] {
            if !gtds.contains(node) {
                return bad(format!("unknown node {node}"));
            }
        }
        if self.soc < Energy::ZERO || self.soc > self.battery {
            return bad(format!("soc {} outside [0, {}]", self.soc, self.battery));
        }
        if !self.battery.is_positive() {
            return bad("battery capacity must be positive".into());
        }
        if !(self.vehicle_rate_kw.is_finite() && self.vehicle_rate_kw > 0.0) {
            return bad(format!("vehicle rate must be positive, got {}", self.vehicle_rate_kw));
        }
        Ok(())
    }
}

/// Leaving charging buckets as percentages of the battery.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Lcb(Vec<u32>);

impl Lcb {
    pub fn new(mut percents: Vec<u32>) -> Result<Lcb, SearchError> {
        percents.sort_unstable();
        percents.dedup();
        if percents.iter().any(|&p| p == 0 || p > 100) {
            return Err(SearchError::InvalidLcb(format!("values must lie in (0, 100]: {percents:?}")));
        }
        if percents.last() != Some(&100) {
            return Err(SearchError::InvalidLcb("100 must be a member".into()));
        }
        Ok(Lcb(percents))
    }

    pub fn full() -> Lcb {
        Lcb(vec![100])
    }

    pub fn percents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Absolute SoC levels for a battery, ascending. The last one is the battery.
    pub fn levels(&self, battery: Energy) -> Vec<Energy> {
        let mut v: Vec<Energy> =
            self.0.iter().map(|&p| if p == 100 { battery } else { Energy(battery.micro() * p as i64 / 100) }).collect();
        v.dedup();
        v
    }
}

impl Default for Lcb {
    fn default() -> Self {
        Lcb(vec![50, 75, 100])
    }
}

impl TryFrom<Vec<u32>> for Lcb {
    type Error = SearchError;
    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        Lcb::new(v)
    }
}

impl From<Lcb> for Vec<u32> {
    fn from(l: Lcb) -> Self {
        l.0
    }
}

impl FromStr for Lcb {
    type Err = SearchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parsed: Result<Vec<u32>, _> = s.split(',').map(|p| p.trim().parse::<u32>()).collect();
        Lcb::new(parsed.map_err(|e| SearchError::InvalidLcb(format!("`{s}`: {e}")))?)
    }
}

impl fmt::Display for Lcb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_levels() {
        let lcb: Lcb = "75, 50,100".parse().unwrap();
        assert_eq!(lcb.percents(), &[50, 75, 100]);
        assert_eq!(lcb.to_string(), "50,75,100");
        let b = Energy::from_kwh(5.0);
        assert_eq!(Lcb::new(vec![60, 100]).unwrap().levels(b), vec![Energy::from_kwh(3.0), b]);
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(Lcb::new(vec![50, 75]).is_err());
        assert!(Lcb::new(vec![0, 100]).is_err());
        assert!(Lcb::new(vec![120, 100]).is_err());
        assert!("50,x".parse::<Lcb>().is_err());
    }
}
