//! Parameter sweeps: one axis varied at a time around a base setting.

use std::io;

use serde::{Deserialize, Serialize};

use super::{generate_stream, run_simulation, Regime, SimError, SimParams, StreamConfig, TripModel, VehicleModel};
use crate::gtds::{Gtds, Metric};
use crate::planner::{OraclePredictor, PlannerOptions, PlannerRegistry};
use crate::search::Lcb;
use crate::units::Minutes;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub ev_counts: Vec<usize>,
    pub distances_km: Vec<f64>,
    pub lcbs: Vec<Lcb>,
    pub slot_minutes: Vec<Minutes>,
    pub modes: Vec<String>,
    /// Values used for the axes not being varied.
    pub base_count: usize,
    pub base_distance_km: f64,
    pub base: SimParams,
    pub rate_per_min: f64,
    pub vehicle: VehicleModel,
    pub options: SweepOptions,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepOptions {
    pub lookahead: usize,
    pub epsilon: Minutes,
}

impl Default for SweepOptions {
    fn default() -> Self {
        let o = PlannerOptions::default();
        SweepOptions { lookahead: o.lookahead, epsilon: o.epsilon }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            ev_counts: vec![100, 200, 400],
            distances_km: vec![200.0, 300.0, 400.0],
            lcbs: vec![
                Lcb::new(vec![100]).expect("valid"),
                Lcb::default(),
                Lcb::new(vec![25, 50, 75, 100]).expect("valid"),
            ],
            slot_minutes: vec![5, 10, 15],
            modes: vec!["ocp".into(), "ocp-po".into()],
            base_count: 200,
            base_distance_km: 400.0,
            base: SimParams { timing: false, ..SimParams::default() },
            rate_per_min: 2.0,
            vehicle: VehicleModel::default(),
            options: SweepOptions::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub mode: String,
    pub requests: usize,
    pub feasible: usize,
    pub avg_total_min: f64,
    pub avg_drive_min: f64,
    pub avg_charge_min: f64,
    pub avg_wait_min: f64,
    pub avg_query_ms: f64,
}

struct Case {
    axis: &'static str,
    value: String,
    count: usize,
    distance: f64,
    params: SimParams,
}

pub fn run_sweep(
    gtds: &Gtds,
    metric: Metric,
    cfg: &SweepConfig,
    registry: &PlannerRegistry,
) -> Result<Vec<SweepRow>, SimError> {
    let opts = PlannerOptions { lookahead: cfg.options.lookahead, epsilon: cfg.options.epsilon };
    let planners = cfg.modes.iter().map(|m| registry.create(m, &opts)).collect::<Result<Vec<_>, _>>()?;
    let base = |axis, value: String| Case {
        axis,
        value,
        count: cfg.base_count,
        distance: cfg.base_distance_km,
        params: cfg.base.clone(),
    };
    let mut cases = Vec::new();
    for &n in &cfg.ev_counts {
        cases.push(Case { count: n, ..base("ev_count", n.to_string()) });
    }
    for &d in &cfg.distances_km {
        cases.push(Case { distance: d, ..base("distance_km", d.to_string()) });
    }
    for lcb in &cfg.lcbs {
        let mut c = base("lcb", lcb.to_string());
        c.params.lcb = lcb.clone();
        cases.push(c);
    }
    for &t in &cfg.slot_minutes {
        let mut c = base("slot_min", t.to_string());
        c.params.slot_minutes = t;
        cases.push(c);
    }

    let mut rows = Vec::new();
    for case in cases {
        let stream_cfg = StreamConfig {
            regimes: vec![Regime {
                rate_per_min: cfg.rate_per_min,
                duration_min: 2.0 * case.count as f64 / cfg.rate_per_min + 60.0,
            }],
            trip: TripModel::FixedDistance { km: case.distance },
            vehicle: cfg.vehicle.clone(),
            seed: cfg.seed,
            max_requests: Some(case.count),
            start_min: 0,
        };
        let stream = generate_stream(gtds, metric, &stream_cfg)?;
        for planner in &planners {
            let mut predictor = OraclePredictor::new(stream.clone());
            let trt = case.params.fresh_trt(gtds)?;
            let out = run_simulation(gtds, trt, &stream, planner.as_ref(), Some(&mut predictor), &case.params)?;
            let s = out.metrics.summary();
            rows.push(SweepRow {
                axis: case.axis.to_owned(),
                value: case.value.clone(),
                mode: planner.name().to_owned(),
                requests: s.requests,
                feasible: s.feasible,
                avg_total_min: s.avg(s.total_min),
                avg_drive_min: s.avg(s.drive_min),
                avg_charge_min: s.avg(s.charge_min),
                avg_wait_min: s.avg(s.wait_min),
                avg_query_ms: s.avg_query_ms(),
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: io::Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
