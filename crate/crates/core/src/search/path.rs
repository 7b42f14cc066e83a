use serde::Serialize;

use super::charging::earliest_departure;
use super::{RoutingRequest, SearchError};
use crate::gtds::{Gtds, NodeId};
use crate::ledger::Trt;
use crate::units::{Energy, Minutes, Slot, SlotRange};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stop {
    pub node: NodeId,
    pub arrival: Minutes,
    pub arrival_soc: Energy,
    pub depart: Minutes,
    /// Leave-SoC bucket; `None` at the destination.
    pub leave_soc: Option<Energy>,
    pub slots: Option<SlotRange>,
    pub wait: Minutes,
    pub charge_time: Minutes,
}

/// A route with its exact charging schedule and time decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChargingPath {
    pub stops: Vec<Stop>,
    pub charging: Vec<(NodeId, SlotRange)>,
    pub drive: Minutes,
    pub charge: Minutes,
    pub wait: Minutes,
    pub total: Minutes,
}

/// Identity of a schedule: per stop, node, leave SoC and charging slots.
pub type ScheduleKey = Vec<(NodeId, Option<Energy>, Option<SlotRange>)>;

impl ChargingPath {
    /// A zero-length path for `origin == destination`.
    pub fn trivial(req: &RoutingRequest) -> ChargingPath {
        ChargingPath {
            stops: vec![Stop {
                node: req.origin,
                arrival: req.depart,
                arrival_soc: req.soc,
                depart: req.depart,
                leave_soc: None,
                slots: None,
                wait: 0,
                charge_time: 0,
            }],
            charging: Vec::new(),
            drive: 0,
            charge: 0,
            wait: 0,
            total: 0,
        }
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        self.stops.iter().map(|s| s.node).collect()
    }

    pub fn schedule_key(&self) -> ScheduleKey {
        self.stops.iter().map(|s| (s.node, s.leave_soc, s.slots)).collect()
    }

    pub fn arrival(&self) -> Minutes {
        self.stops.last().map_or(0, |s| s.arrival)
    }

    /// Every reserved `(station, slot)`.
    pub fn slot_set(&self) -> impl Iterator<Item = (NodeId, Slot)> + '_ {
        self.charging.iter().flat_map(|&(s, r)| r.iter().map(move |slot| (s, slot)))
    }

    /// Check the structural invariants: SoC bounds, bucket membership,
    /// contiguity and the decomposition identity.
    pub fn check(&self, gtds: &Gtds, req: &RoutingRequest, levels: &[Energy]) -> Result<(), String> {
        if self.total != self.drive + self.charge + self.wait {
            return Err(format!("total {} != {} + {} + {}", self.total, self.drive, self.charge, self.wait));
        }
        let mut drive = 0;
        for (i, stop) in self.stops.iter().enumerate() {
            if stop.arrival_soc < Energy::ZERO || stop.arrival_soc > req.battery {
                return Err(format!("arrival soc {} out of range at stop {i}", stop.arrival_soc));
            }
            if let Some(soc) = stop.leave_soc {
                if soc < stop.arrival_soc || soc > req.battery {
                    return Err(format!("leave soc {soc} out of range at stop {i}"));
                }
                if i > 0 && !levels.contains(&soc) {
                    return Err(format!("leave soc {soc} at stop {i} is not a bucket"));
                }
            }
            if stop.depart - stop.arrival != stop.wait + stop.charge_time {
                return Err(format!("stop {i} dwell does not decompose"));
            }
            if i > 0 {
                let prev = &self.stops[i - 1];
                let e =
                    gtds.edge(prev.node, stop.node).ok_or_else(|| format!("no edge {} -> {}", prev.node, stop.node))?;
                drive += e.w;
                if stop.arrival != prev.depart + e.w {
                    return Err(format!("arrival at stop {i} inconsistent with edge time"));
                }
                let leave = prev.leave_soc.unwrap_or(prev.arrival_soc);
                if stop.arrival_soc != leave - e.cost() {
                    return Err(format!("arrival soc at stop {i} inconsistent with edge energy"));
                }
            }
        }
        if drive != self.drive {
            return Err(format!("drive {} != edge sum {drive}", self.drive));
        }
        if self.stops.first().map(|s| s.node) != Some(req.origin)
            || self.stops.last().map(|s| s.node) != Some(req.destination)
        {
            return Err("path does not connect origin to destination".into());
        }
        Ok(())
    }
}

/// Drive a fixed node sequence, charging to the given target at each stop
/// that has one, each as early as contiguous free slots allow. Intermediate
/// landmarks are allowed. The first entry must be the request origin.
pub fn simulate_path(
    gtds: &Gtds,
    trt: &Trt,
    req: &RoutingRequest,
    legs: &[(NodeId, Option<Energy>)],
    overhead: Minutes,
) -> Result<ChargingPath, SearchError> {
    let infeasible = |msg: String| SearchError::InfeasiblePath(msg);
    let Some(&(first, _)) = legs.first() else {
        return Err(infeasible("empty path".into()));
    };
    if first != req.origin {
        return Err(infeasible(format!("path starts at {first}, not the origin")));
    }
    let mut stops = vec![Stop {
        node: req.origin,
        arrival: req.depart,
        arrival_soc: req.soc,
        depart: req.depart,
        leave_soc: Some(req.soc),
        slots: None,
        wait: 0,
        charge_time: 0,
    }];
    let mut path = ChargingPath { stops: Vec::new(), charging: Vec::new(), drive: 0, charge: 0, wait: 0, total: 0 };
    let (mut t, mut soc) = (req.depart, req.soc);
    for (i, &(node, target)) in legs.iter().enumerate().skip(1) {
        let prev = legs[i - 1].0;
        let e = gtds.edge(prev, node).ok_or_else(|| infeasible(format!("no edge {prev} -> {node}")))?;
        t += e.w;
        soc -= e.cost();
        path.drive += e.w;
        if soc < Energy::ZERO {
            return Err(infeasible(format!("battery depleted before reaching {}", gtds.name(node))));
        }
        let mut stop = Stop {
            node,
            arrival: t,
            arrival_soc: soc,
            depart: t,
            leave_soc: None,
            slots: None,
            wait: 0,
            charge_time: 0,
        };
        if let Some(target) = target {
            if target > req.battery {
                return Err(infeasible(format!("target {target} exceeds the battery")));
            }
            if gtds.is_station(node) {
                let w = earliest_departure(trt, node, t, soc, target, req.vehicle_rate_kw, overhead)?
                    .ok_or_else(|| infeasible(format!("no charging window at {}", gtds.name(node))))?;
                stop.depart = w.depart;
                stop.leave_soc = Some(w.soc_d);
                stop.slots = w.slots;
                stop.wait = w.wait;
                stop.charge_time = w.charge_time;
                if let Some(r) = w.slots {
                    path.charging.push((node, r));
                }
                path.charge += w.charge_time;
                path.wait += w.wait;
                t = w.depart;
                soc = w.soc_d;
            } else if soc < target {
                return Err(infeasible(format!("cannot charge at landmark {}", gtds.name(node))));
            }
        }
        stops.push(stop);
    }
    path.total = t - req.depart;
    path.stops = stops;
    Ok(path)
}
