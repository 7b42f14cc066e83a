//! Planning modes behind one trait, selected by name through a registry.

mod baselines;
mod predictor;
mod registry;

use thiserror::Error;

pub use baselines::{BnbNw, Ocp, OcpFull, OcpMinCharge, OcpMinUnused, OcpProactive};
pub use predictor::{OraclePredictor, PerturbedPredictor, Predictor, PredictorError, Resampler};
pub use registry::{PlannerOptions, PlannerRegistry};

use crate::gtds::Gtds;
use crate::influence::{influence_factors, InfluenceReport};
use crate::ledger::{LedgerError, RequestId, Token, Trt};
use crate::search::{ocp, ChargingPath, Lcb, RoutingRequest, SearchConfig, SearchError};
use crate::units::{Energy, Minutes};

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("unknown planning mode `{0}` (known: {1})")]
    UnknownMode(String, String),
    #[error("request {0}: search returned no path")]
    NoPaths(RequestId),
}

/// Everything a planner reads. The table is a frozen snapshot.
#[derive(Clone, Copy)]
pub struct PlanContext<'a> {
    pub gtds: &'a Gtds,
    pub trt: &'a Trt,
    pub lcb: &'a Lcb,
    pub search: &'a SearchConfig,
}

#[derive(Clone, Debug)]
pub struct Plan {
    pub path: ChargingPath,
    /// Minimum travel time under the planner's own view of the table.
    pub t_min: Minutes,
    /// All optimal paths considered, in enumeration order.
    pub candidates: Vec<ChargingPath>,
    pub chosen: usize,
    pub report: Option<InfluenceReport>,
    /// The predictor failed and the first path was taken.
    pub fallback: bool,
    pub overflow: bool,
}

impl Plan {
    fn pick(candidates: Vec<ChargingPath>, t_min: Minutes, chosen: usize, overflow: bool) -> Plan {
        Plan { path: candidates[chosen].clone(), t_min, candidates, chosen, report: None, fallback: false, overflow }
    }
}

pub trait Planner: Send + Sync {
    fn name(&self) -> &'static str;

    fn plan(
        &self,
        ctx: &PlanContext<'_>,
        req: &RoutingRequest,
        predictor: Option<&mut dyn Predictor>,
    ) -> Result<Plan, PlanError>;

    /// Whether the chosen path's slots are reserved in a simulation.
    fn commits(&self) -> bool {
        true
    }
}

/// Run the search and choose among the optimal paths with `select`.
fn plan_with(
    ctx: &PlanContext<'_>,
    trt: &Trt,
    req: &RoutingRequest,
    lcb: &Lcb,
    select: impl Fn(&[ChargingPath]) -> usize,
) -> Result<Plan, PlanError> {
    let res = ocp(ctx.gtds, trt, req, lcb, ctx.search)?;
    if res.paths.is_empty() {
        return Err(PlanError::NoPaths(req.id));
    }
    let i = select(&res.paths);
    Ok(Plan::pick(res.paths, res.t_min, i, res.overflow))
}

/// Index of the path with the least charging time, first on ties.
pub fn select_min_charge_time(paths: &[ChargingPath]) -> usize {
    (0..paths.len()).min_by_key(|&i| (paths[i].charge, i)).unwrap_or(0)
}

/// Energy the stations could have delivered beyond the vehicle's intake
/// over the path's charging slots: `sum max(0, eta - min(eta, gamma)) * T / 60`.
pub fn unused_charging_potential(path: &ChargingPath, gtds: &Gtds, vehicle_kw: f64, slot_minutes: Minutes) -> Energy {
    path.charging
        .iter()
        .map(|&(station, range)| {
            let eta = gtds.station_rate(station).unwrap_or(0.0);
            let spare = (eta - eta.min(vehicle_kw)).max(0.0);
            Energy::from_kwh(spare * slot_minutes as f64 / 60.0) * range.len()
        })
        .sum()
}

/// All optimal paths scored against the predicted next `n` requests; the
/// lexicographically smallest (direct, indirect) wins, then enumeration order.
/// Nothing is committed.
pub fn plan_proactive(
    ctx: &PlanContext<'_>,
    req: &RoutingRequest,
    predictor: Option<&mut dyn Predictor>,
    n: usize,
    epsilon: Minutes,
) -> Result<Plan, PlanError> {
    let res = ocp(ctx.gtds, ctx.trt, req, ctx.lcb, ctx.search)?;
    if res.paths.is_empty() {
        return Err(PlanError::NoPaths(req.id));
    }
    let mut plan = Plan::pick(res.paths, res.t_min, 0, res.overflow);
    if n == 0 {
        return Ok(plan);
    }
    let futures = match predictor.map(|p| p.next_requests(req, n)) {
        Some(Ok(f)) => f,
        _ => {
            plan.fallback = true;
            return Ok(plan);
        }
    };
    if plan.candidates.len() == 1 || futures.is_empty() {
        return Ok(plan);
    }
    let cfg = ctx.search.with_epsilon(epsilon);
    let report = influence_factors(ctx.gtds, ctx.trt, &plan.candidates, &futures, ctx.lcb, &cfg, true);
    plan.chosen = report.argmin().unwrap_or(0);
    plan.path = plan.candidates[plan.chosen].clone();
    plan.report = Some(report);
    Ok(plan)
}

/// Reserve every charging slot of `path` at once, or nothing on conflict.
pub fn commit_plan(trt: &mut Trt, request: RequestId, path: &ChargingPath) -> Result<Token, LedgerError> {
    trt.reserve_all(request, &path.charging)
}
