//! How much each candidate path would hurt predicted future requests.
//!
//! A candidate is correlated with a future path when both charge at the same
//! station in the same slot. For every future request the search is rerun
//! with slack `epsilon`; a candidate's direct influence is the extra time the
//! future request needs once the correlated paths are taken away, and its
//! indirect influence is how many of the future request's paths it removes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::gtds::{Gtds, NodeId};
use crate::ledger::{RequestId, Trt};
use crate::search::{
    backward_pass, forward_pass, ChargingPath, ForwardStatus, Lcb, Refiner, RoutingRequest, RoutingTableRow,
    SearchConfig,
};
use crate::units::Minutes;

/// Whether two paths reserve a common `(station, slot)`.
pub fn correlation(p: &ChargingPath, q: &ChargingPath) -> bool {
    p.charging.iter().any(|(s, r)| q.charging.iter().any(|(s2, r2)| s == s2 && r.overlaps(r2)))
}

/// Latest time a vehicle may leave each node and still reach a slot used by
/// the current candidates. `-1` marks nodes that cannot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LltiMap {
    values: Vec<Minutes>,
    /// Start minute of the latest candidate slot, per station.
    seeds: Vec<Option<Minutes>>,
}

impl LltiMap {
    pub fn get(&self, node: NodeId) -> Minutes {
        self.values[node.index()]
    }

    pub fn seed(&self, node: NodeId) -> Option<Minutes> {
        self.seeds[node.index()]
    }

    pub fn values(&self) -> &[Minutes] {
        &self.values
    }
}

/// Seed each charged station with the start of its latest used slot (the
/// last moment a vehicle can arrive and still occupy it), then relax over
/// reversed edges, largest value first.
pub fn leave_time_to_impact(paths: &[ChargingPath], gtds: &Gtds, slot_minutes: Minutes) -> LltiMap {
    let n = gtds.node_count();
    let mut seeds: Vec<Option<Minutes>> = vec![None; n];
    for p in paths {
        for &(station, range) in &p.charging {
            let start = range.last() * slot_minutes;
            let s = &mut seeds[station.index()];
            *s = Some(s.map_or(start, |v| v.max(start)));
        }
    }
    let mut values = vec![-1; n];
    let mut heap = BinaryHeap::new();
    for (i, s) in seeds.iter().enumerate() {
        if let Some(v) = *s {
            values[i] = v;
            heap.push((v, Reverse(i)));
        }
    }
    while let Some((v, Reverse(i))) = heap.pop() {
        if v < values[i] {
            continue;
        }
        for e in gtds.in_edges(NodeId(i as u32)) {
            let cand = v - e.w;
            let m = e.from.index();
            if cand > values[m] {
                values[m] = cand;
                heap.push((cand, Reverse(m)));
            }
        }
    }
    LltiMap { values, seeds }
}

impl Refiner for LltiMap {
    fn alive(&self, node: NodeId, t: Minutes) -> bool {
        t <= self.get(node)
    }

    fn relevant(&self, row: &RoutingTableRow) -> bool {
        match (row.t_a, self.seed(row.node)) {
            (Some(t_a), Some(seed)) => t_a <= seed,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FutureStatus {
    Evaluated,
    RefinedAway,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FutureOutcome {
    pub request: RequestId,
    pub status: FutureStatus,
    /// Paths found within the slack band.
    pub paths: usize,
    pub t_min: Option<Minutes>,
    pub overflow: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InfluenceReport {
    /// Per candidate, added minutes summed over future requests.
    pub direct: Vec<Minutes>,
    /// Per candidate, future paths invalidated.
    pub indirect: Vec<u64>,
    pub futures: Vec<FutureOutcome>,
}

impl InfluenceReport {
    pub fn refined_away(&self) -> usize {
        self.futures.iter().filter(|f| f.status == FutureStatus::RefinedAway).count()
    }

    /// Index of the lexicographically smallest `(direct, indirect)`, first on ties.
    pub fn argmin(&self) -> Option<usize> {
        (0..self.direct.len()).min_by_key(|&i| (self.direct[i], self.indirect[i], i))
    }
}

struct Contribution {
    outcome: FutureOutcome,
    direct: Vec<Minutes>,
    indirect: Vec<u64>,
}

fn evaluate(
    gtds: &Gtds,
    trt: &Trt,
    candidates: &[ChargingPath],
    llti: Option<&LltiMap>,
    future: &RoutingRequest,
    lcb: &Lcb,
    cfg: &SearchConfig,
) -> Contribution {
    let k = candidates.len();
    let mut c = Contribution {
        outcome: FutureOutcome {
            request: future.id,
            status: FutureStatus::Infeasible,
            paths: 0,
            t_min: None,
            overflow: false,
        },
        direct: vec![0; k],
        indirect: vec![0; k],
    };
    let levels = lcb.levels(future.battery);
    let refiner = llti.map(|l| l as &dyn Refiner);
    let Ok(fwd) = forward_pass(gtds, trt, future, &levels, cfg, refiner) else {
        return c;
    };
    match fwd.status {
        ForwardStatus::RefinedAway => {
            c.outcome.status = FutureStatus::RefinedAway;
            return c;
        }
        ForwardStatus::Unreachable => return c,
        ForwardStatus::Complete => {}
    }
    let (Some(best), Some(bound)) = (fwd.best, fwd.bound) else {
        return c;
    };
    let paths = if future.origin == future.destination {
        vec![ChargingPath::trivial(future)]
    } else {
        match backward_pass(gtds, trt, future, &fwd.table, bound, cfg) {
            Ok(b) => {
                c.outcome.overflow = b.overflow;
                b.paths
            }
            Err(_) => return c,
        }
    };
    let t_min = best - future.depart;
    c.outcome.status = FutureStatus::Evaluated;
    c.outcome.paths = paths.len();
    c.outcome.t_min = Some(t_min);
    for (i, p) in candidates.iter().enumerate() {
        let free: Vec<&ChargingPath> = paths.iter().filter(|q| !correlation(p, q)).collect();
        c.direct[i] = match free.iter().map(|q| q.total).min() {
            Some(m) => m - t_min,
            None => cfg.epsilon,
        };
        c.indirect[i] = (paths.len() - free.len()) as u64;
    }
    c
}

/// Score every candidate against every future request. `cfg.epsilon` is the
/// slack; `prune` enables early abandonment of futures the candidates cannot
/// touch. Futures are scored independently on the same table.
pub fn influence_factors(
    gtds: &Gtds,
    trt: &Trt,
    candidates: &[ChargingPath],
    future: &[RoutingRequest],
    lcb: &Lcb,
    cfg: &SearchConfig,
    prune: bool,
) -> InfluenceReport {
    let k = candidates.len();
    let llti = prune.then(|| leave_time_to_impact(candidates, gtds, trt.slot_minutes()));
    let parts: Vec<Contribution> =
        future.par_iter().map(|f| evaluate(gtds, trt, candidates, llti.as_ref(), f, lcb, cfg)).collect();
    let mut report =
        InfluenceReport { direct: vec![0; k], indirect: vec![0; k], futures: Vec::with_capacity(parts.len()) };
    for part in parts {
        for i in 0..k {
            report.direct[i] += part.direct[i];
            report.indirect[i] += part.indirect[i];
        }
        report.futures.push(part.outcome);
    }
    report
}
