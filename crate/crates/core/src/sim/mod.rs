//! Online simulation: requests are planned in departure order against one
//! shared reservation table, and the chosen slots are committed.

mod instance;
mod metrics;
mod stream;
mod sweep;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use instance::{grid_instance, GridSpec};
pub use metrics::{MetricRow, RunMetrics, Summary};
pub use stream::{generate_stream, Regime, StreamConfig, TripModel, TripSampler, VehicleModel};
pub use sweep::{run_sweep, write_sweep_csv, SweepConfig, SweepRow};

use crate::gtds::{GraphError, Gtds};
use crate::io::IoError;
use crate::ledger::{BeyondWindow, LedgerError, Trt};
use crate::planner::{commit_plan, PlanContext, PlanError, Planner, Predictor, PredictorError};
use crate::search::{Lcb, RoutingRequest, SearchConfig, SearchError};
use crate::units::Minutes;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("requests must be sorted by departure (request {0} departs before its predecessor)")]
    Unsorted(u64),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Predictor(#[from] PredictorError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    pub slot_minutes: Minutes,
    /// Window length in slots; `None` covers two days.
    pub window_slots: Option<i64>,
    pub lcb: Lcb,
    pub search: SearchConfig,
    pub beyond_window: BeyondWindow,
    /// Record wall-clock planning time per request; off gives zeros.
    pub timing: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            slot_minutes: 5,
            window_slots: None,
            lcb: Lcb::default(),
            search: SearchConfig { overhead: 5, ..SearchConfig::default() },
            beyond_window: BeyondWindow::default(),
            timing: true,
        }
    }
}

impl SimParams {
    pub fn window_len(&self) -> i64 {
        self.window_slots.unwrap_or(2 * 24 * 60 / self.slot_minutes.max(1))
    }

    pub fn fresh_trt(&self, gtds: &Gtds) -> Result<Trt, LedgerError> {
        Ok(Trt::new(gtds, self.slot_minutes, self.window_len())?.with_policy(self.beyond_window))
    }
}

#[derive(Debug)]
pub struct SimOutcome {
    pub metrics: RunMetrics,
    /// The table after all commits.
    pub trt: Trt,
}

fn infeasible(err: &PlanError) -> bool {
    matches!(err, PlanError::NoPaths(_) | PlanError::Search(SearchError::Unreachable(_)))
}

/// Plan `requests` in order on `trt`. Unreachable requests are recorded as
/// infeasible and skipped; any other error aborts the run.
pub fn run_simulation(
    gtds: &Gtds,
    mut trt: Trt,
    requests: &[RoutingRequest],
    planner: &dyn Planner,
    mut predictor: Option<&mut dyn Predictor>,
    params: &SimParams,
) -> Result<SimOutcome, SimError> {
    if let Some(w) = requests.windows(2).find(|w| w[1].depart < w[0].depart) {
        return Err(SimError::Unsorted(w[1].id));
    }
    let mut metrics = RunMetrics::new(planner.name());
    for req in requests {
        let slot = trt.slot_of(req.depart);
        if slot > trt.window_start() {
            trt.advance_window(slot)?;
        }
        let started = Instant::now();
        let result = {
            let ctx = PlanContext { gtds, trt: &trt, lcb: &params.lcb, search: &params.search };
            planner.plan(&ctx, req, predictor.as_mut().map(|p| &mut **p as &mut dyn Predictor))
        };
        let query_ms = if params.timing { started.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
        let mut row = MetricRow {
            request_id: req.id,
            mode: planner.name().to_owned(),
            total_min: 0,
            drive_min: 0,
            charge_min: 0,
            wait_min: 0,
            query_ms,
            feasible: false,
        };
        match result {
            Ok(plan) => {
                if planner.commits() {
                    commit_plan(&mut trt, req.id, &plan.path)?;
                }
                let p = &plan.path;
                row.total_min = p.total;
                row.drive_min = p.drive;
                row.charge_min = p.charge;
                row.wait_min = p.wait;
                row.feasible = true;
                metrics.fallbacks += plan.fallback as usize;
                metrics.overflows += plan.overflow as usize;
                if let Some(report) = &plan.report {
                    metrics.refined_away += report.refined_away();
                }
            }
            Err(e) if infeasible(&e) => {}
            Err(e) => return Err(e.into()),
        }
        metrics.rows.push(row);
    }
    Ok(SimOutcome { metrics, trt })
}
