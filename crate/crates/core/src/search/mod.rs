//! Optimal charging path search: a forward label-setting pass that builds
//! the routing table and bound, then a backward pass that enumerates every
//! path meeting the bound.

mod backward;
mod charging;
mod forward;
mod path;
mod request;
mod table;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use backward::{backward_pass, BackwardOutcome};
pub use charging::{earliest_departure, latest_arrival, ChargeWindow};
pub use forward::{forward_pass, ForwardOutcome, ForwardStatus, Refiner, SearchStats};
pub use path::{simulate_path, ChargingPath, ScheduleKey, Stop};
pub use request::{Lcb, RoutingRequest};
pub use table::{RoutingTable, RoutingTableRow};

use crate::gtds::Gtds;
use crate::ledger::{LedgerError, RequestId, Trt};
use crate::units::Minutes;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("request {0}: {1}")]
    InvalidRequest(RequestId, String),
    #[error("invalid charging buckets: {0}")]
    InvalidLcb(String),
    #[error("request {0}: destination unreachable")]
    Unreachable(RequestId),
    #[error("infeasible path: {0}")]
    InfeasiblePath(String),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Fixed time added to every charging event.
    pub overhead: Minutes,
    /// Slack above the optimum for the backward enumeration.
    pub epsilon: Minutes,
    /// Cap on enumerated paths.
    pub max_paths: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { overhead: 0, epsilon: 0, max_paths: 256 }
    }
}

impl SearchConfig {
    pub fn with_epsilon(&self, epsilon: Minutes) -> SearchConfig {
        SearchConfig { epsilon, ..self.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct OcpResult {
    /// All paths arriving within `t_min + epsilon`, in enumeration order.
    pub paths: Vec<ChargingPath>,
    pub t_min: Minutes,
    pub table: RoutingTable,
    pub overflow: bool,
    pub stats: SearchStats,
}

/// Both passes with the slack in `cfg.epsilon`.
pub fn ocp_band(
    gtds: &Gtds,
    trt: &Trt,
    req: &RoutingRequest,
    lcb: &Lcb,
    cfg: &SearchConfig,
) -> Result<OcpResult, SearchError> {
    let levels = lcb.levels(req.battery);
    let fwd = forward_pass(gtds, trt, req, &levels, cfg, None)?;
    let (Some(best), Some(bound)) = (fwd.best, fwd.bound) else {
        return Err(SearchError::Unreachable(req.id));
    };
    if req.origin == req.destination {
        return Ok(OcpResult {
            paths: vec![ChargingPath::trivial(req)],
            t_min: 0,
            table: fwd.table,
            overflow: false,
            stats: fwd.stats,
        });
    }
    let bwd = backward_pass(gtds, trt, req, &fwd.table, bound, cfg)?;
    Ok(OcpResult {
        paths: bwd.paths,
        t_min: best - req.depart,
        table: fwd.table,
        overflow: bwd.overflow,
        stats: fwd.stats,
    })
}

/// All minimum-time charging paths.
pub fn ocp(
    gtds: &Gtds,
    trt: &Trt,
    req: &RoutingRequest,
    lcb: &Lcb,
    cfg: &SearchConfig,
) -> Result<OcpResult, SearchError> {
    ocp_band(gtds, trt, req, lcb, &cfg.with_epsilon(0))
}
