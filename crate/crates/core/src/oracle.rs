//! Brute-force reference for small instances.
//!
//! Works directly on the time-expanded state space `(node, leave time, leave
//! SoC)` with memoised recursion; the brute force shares no code with
//! [`crate::search`].
//! Charging follows the literal slot-by-slot rule: accumulate gains over
//! consecutive slots from the first slot boundary after arrival, starting
//! over whenever a reserved slot interrupts.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gtds::{Gtds, NodeId};
use crate::io::{EdgeRecord, InstanceFile, LandmarkRecord, RequestRecord, ReservationRecord, StationRecord};
use crate::ledger::{LedgerError, Trt};
use crate::search::{ocp, Lcb, RoutingRequest, SearchConfig, SearchError};
use crate::units::{Energy, Minutes, Slot, SlotRange};

pub const MAX_STATIONS: usize = 10;
pub const MAX_HORIZON: i64 = 64;
const MAX_SCHEDULES: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("more than {MAX_SCHEDULES} optimal schedules")]
    TooManySchedules,
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

/// Per stop: node, leave SoC (none at the destination) and charging slots.
pub type Schedule = Vec<(NodeId, Option<Energy>, Option<SlotRange>)>;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    /// Minimum travel time, `None` when nothing arrives within the horizon.
    pub t_min: Option<Minutes>,
    pub schedules: BTreeSet<Schedule>,
}

type State = (NodeId, Minutes, Energy);

struct Ctx<'a> {
    gtds: &'a Gtds,
    trt: &'a Trt,
    req: &'a RoutingRequest,
    levels: &'a [Energy],
    overhead: Minutes,
    last_minute: Minutes,
    best: HashMap<State, Option<Minutes>>,
}

enum Step {
    Arrive(Minutes),
    Leave(State, Option<SlotRange>),
}

impl Ctx<'_> {
    fn charge(
        &self,
        station: NodeId,
        arrival: Minutes,
        soc: Energy,
        target: Energy,
    ) -> Result<Option<(Minutes, Option<SlotRange>)>, LedgerError> {
        if soc >= target {
            return Ok(Some((arrival, None)));
        }
        let t = self.trt.slot_minutes();
        let last_slot: Slot = self.last_minute / t;
        let mut start = (arrival + t - 1).div_euclid(t);
        let mut acc = soc;
        let mut slot = start;
        while slot < last_slot {
            let gain = self.trt.query_slot(station, slot, self.req.vehicle_rate_kw)?;
            slot += 1;
            if gain == Energy::ZERO {
                acc = soc;
                start = slot;
                continue;
            }
            acc += gain;
            if acc >= target {
                return Ok(Some((slot * t + self.overhead, Some(SlotRange::new(start, slot)))));
            }
        }
        Ok(None)
    }

    fn steps(&self, (m, t, soc): State) -> Result<Vec<(NodeId, Step)>, LedgerError> {
        let mut out = Vec::new();
        for e in self.gtds.out_edges(m) {
            let n = e.to;
            let arrive_soc = soc + e.u;
            let arrive = t + e.w;
            if arrive_soc < Energy::ZERO || arrive > self.last_minute || n == self.req.origin {
                continue;
            }
            if n == self.req.destination {
                out.push((n, Step::Arrive(arrive)));
            } else if self.gtds.is_station(n) {
                for &b in self.levels {
                    if b < arrive_soc {
                        continue;
                    }
                    if let Some((leave, slots)) = self.charge(n, arrive, arrive_soc, b)? {
                        if leave <= self.last_minute {
                            out.push((n, Step::Leave((n, leave, b), slots)));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Earliest destination arrival reachable from a state.
    fn best_from(&mut self, s: State) -> Result<Option<Minutes>, LedgerError> {
        if let Some(v) = self.best.get(&s) {
            return Ok(*v);
        }
        let mut best: Option<Minutes> = None;
        for (_, step) in self.steps(s)? {
            let v = match step {
                Step::Arrive(t) => Some(t),
                Step::Leave(next, _) => self.best_from(next)?,
            };
            if let Some(v) = v {
                best = Some(best.map_or(v, |b: Minutes| b.min(v)));
            }
        }
        self.best.insert(s, best);
        Ok(best)
    }

    fn enumerate(
        &mut self,
        s: State,
        target: Minutes,
        prefix: &mut Schedule,
        out: &mut BTreeSet<Schedule>,
    ) -> Result<(), OracleError> {
        for (n, step) in self.steps(s)? {
            match step {
                Step::Arrive(t) if t == target => {
                    prefix.push((n, None, None));
                    out.insert(prefix.clone());
                    prefix.pop();
                    if out.len() > MAX_SCHEDULES {
                        return Err(OracleError::TooManySchedules);
                    }
                }
                Step::Arrive(_) => {}
                Step::Leave(next, slots) => {
                    if self.best_from(next)? == Some(target) {
                        prefix.push((n, Some(next.2), slots));
                        self.enumerate(next, target, prefix, out)?;
                        prefix.pop();
                    }
                }
            }
        }
        Ok(())
    }
}

/// Exhaustive minimum travel time and every schedule achieving it, looking
/// only at departures up to `horizon` slots.
pub fn brute_force_ocp(
    gtds: &Gtds,
    trt: &Trt,
    req: &RoutingRequest,
    levels: &[Energy],
    overhead: Minutes,
    horizon: i64,
) -> Result<OracleResult, OracleError> {
    let stations = gtds.stations().count();
    if stations > MAX_STATIONS {
        return Err(OracleError::TooLarge(format!("{stations} stations")));
    }
    if horizon > MAX_HORIZON {
        return Err(OracleError::TooLarge(format!("horizon of {horizon} slots")));
    }
    if req.origin == req.destination {
        return Ok(OracleResult { t_min: Some(0), schedules: BTreeSet::from([vec![(req.origin, None, None)]]) });
    }
    let mut ctx =
        Ctx { gtds, trt, req, levels, overhead, last_minute: horizon * trt.slot_minutes(), best: HashMap::new() };
    let start = (req.origin, req.depart, req.soc);
    let Some(arrival) = ctx.best_from(start)? else {
        return Ok(OracleResult { t_min: None, schedules: BTreeSet::new() });
    };
    let mut schedules = BTreeSet::new();
    ctx.enumerate(start, arrival, &mut vec![(req.origin, Some(req.soc), None)], &mut schedules)?;
    Ok(OracleResult { t_min: Some(arrival - req.depart), schedules })
}

/// A self-contained random case, serialisable for replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomCase {
    pub seed: u64,
    pub instance: InstanceFile,
    pub request: RequestRecord,
    pub lcb: Vec<u32>,
    pub slot_minutes: Minutes,
    pub overhead: Minutes,
    pub horizon: i64,
}

/// Random small instance: up to 8 stations, one-minute slots, a 40-slot
/// horizon, travel times of 2 to 6 slots and scattered reservations.
pub fn random_case(seed: u64) -> RandomCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = 40;
    let n_st = rng.random_range(2..=8);
    let battery = [8.0, 10.0, 12.0][rng.random_range(0..3)];
    let stations: Vec<StationRecord> = (0..n_st)
        .map(|i| StationRecord {
            id: format!("c{}", i + 1),
            x: i as f64,
            y: 1.0,
            rate_kwh: 60.0 * rng.random_range(1..=3) as f64,
        })
        .collect();
    let landmarks = vec![
        LandmarkRecord { id: "o".into(), x: -1.0, y: 0.0 },
        LandmarkRecord { id: "d".into(), x: n_st as f64, y: 0.0 },
    ];
    let mut edges = Vec::new();
    let edge = |rng: &mut ChaCha8Rng, from: &str, to: &str| EdgeRecord {
        from: from.into(),
        to: to.into(),
        w_min: rng.random_range(2..=6),
        u_kwh: -(rng.random_range(1..=(battery as i64 * 2 / 3)) as f64),
    };
    for s in &stations {
        if rng.random_bool(0.6) {
            edges.push(edge(&mut rng, "o", &s.id));
        }
        if rng.random_bool(0.6) {
            edges.push(edge(&mut rng, &s.id, "d"));
        }
        for t in &stations {
            if s.id != t.id && rng.random_bool(0.35) {
                edges.push(edge(&mut rng, &s.id, &t.id));
            }
        }
    }
    if rng.random_bool(0.15) {
        edges.push(edge(&mut rng, "o", "d"));
    }
    let mut reservations = Vec::new();
    for s in &stations {
        let mut slot = rng.random_range(0..6);
        while slot < horizon {
            let len = rng.random_range(1..=4);
            if rng.random_bool(0.5) {
                reservations.push(ReservationRecord {
                    station: s.id.clone(),
                    slots: [slot, slot + len - 1],
                    holder: None,
                });
            }
            slot += len + rng.random_range(1..6);
        }
    }
    let mut pool = [30, 40, 50, 60, 70, 80, 90];
    pool.shuffle(&mut rng);
    let mut lcb: Vec<u32> = pool[..rng.random_range(0..=2)].to_vec();
    lcb.push(100);
    lcb.sort_unstable();
    let request = RequestRecord {
        id: seed,
        origin: "o".into(),
        destination: "d".into(),
        depart_min: rng.random_range(0..4),
        soc_kwh: rng.random_range(1..=battery as i64) as f64,
        battery_kwh: battery,
        vehicle_rate_kwh: 60.0 * rng.random_range(1..=3) as f64,
    };
    RandomCase {
        seed,
        instance: InstanceFile { stations, landmarks, edges: Some(edges), reservations, ..Default::default() },
        request,
        lcb,
        slot_minutes: 1,
        overhead: rng.random_range(0..=1),
        horizon,
    }
}

/// Outcome of comparing the search engine with the brute force on one case.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Same optimum and the same set of optimal schedules.
    Agree {
        t_min: Option<Minutes>,
        schedules: usize,
    },
    Disagree(String),
}

/// Build `case`, solve it both ways and compare.
pub fn check_case(case: &RandomCase) -> Verdict {
    let built = (|| -> Result<_, String> {
        let inst = case.instance.build().map_err(|e| e.to_string())?;
        let trt = inst.trt(case.slot_minutes, MAX_HORIZON).map_err(|e| e.to_string())?;
        let req = case.request.to_request(&inst.gtds).map_err(|e| e.to_string())?;
        let lcb = Lcb::new(case.lcb.clone()).map_err(|e| e.to_string())?;
        Ok((inst.gtds, trt, req, lcb))
    })();
    let (gtds, trt, req, lcb) = match built {
        Ok(b) => b,
        Err(e) => return Verdict::Disagree(format!("case does not build: {e}")),
    };
    let levels = lcb.levels(req.battery);
    let cfg = SearchConfig { overhead: case.overhead, ..SearchConfig::default() };
    let truth = match brute_force_ocp(&gtds, &trt, &req, &levels, case.overhead, case.horizon) {
        Ok(t) => t,
        Err(e) => return Verdict::Disagree(format!("brute force failed: {e}")),
    };
    let got = ocp(&gtds, &trt, &req, &lcb, &cfg);
    match (truth.t_min, got) {
        (Some(t), Ok(res)) => {
            if res.t_min != t {
                return Verdict::Disagree(format!("minimum travel time {} but brute force gives {t}", res.t_min));
            }
            if res.overflow {
                return Verdict::Disagree("path enumeration overflowed".into());
            }
            let keys: BTreeSet<Schedule> = res.paths.iter().map(|p| p.schedule_key()).collect();
            if keys.len() != res.paths.len() {
                return Verdict::Disagree("duplicate paths".into());
            }
            if keys != truth.schedules {
                let missing = truth.schedules.difference(&keys).count();
                let extra = keys.difference(&truth.schedules).count();
                return Verdict::Disagree(format!("schedule sets differ: {missing} missing, {extra} extra"));
            }
            if let Some(err) = res.paths.iter().find_map(|p| p.check(&gtds, &req, &levels).err()) {
                return Verdict::Disagree(format!("invalid path: {err}"));
            }
            Verdict::Agree { t_min: Some(t), schedules: keys.len() }
        }
        (Some(t), Err(e)) => Verdict::Disagree(format!("search failed ({e}) but brute force gives {t}")),
        (None, Err(SearchError::Unreachable(_))) => Verdict::Agree { t_min: None, schedules: 0 },
        // beyond the brute-force horizon
        (None, Ok(res)) if req.depart + res.t_min > case.horizon * case.slot_minutes => {
            Verdict::Agree { t_min: None, schedules: 0 }
        }
        (None, Ok(res)) => Verdict::Disagree(format!("search found {} but brute force found nothing", res.t_min)),
        (None, Err(e)) => Verdict::Disagree(format!("search failed: {e}")),
    }
}
