//! JSON rendering with node names instead of ids.

use perp_core::influence::InfluenceReport;
use perp_core::planner::Plan;
use perp_core::search::{ChargingPath, RoutingTable};
use perp_core::sim::Summary;
use perp_core::Gtds;
use serde_json::{json, Value};

pub fn path(gtds: &Gtds, p: &ChargingPath) -> Value {
    let stops: Vec<Value> = p
        .stops
        .iter()
        .map(|s| {
            json!({
                "node": gtds.name(s.node),
                "arrival_min": s.arrival,
                "arrival_soc_kwh": s.arrival_soc.kwh(),
                "depart_min": s.depart,
                "leave_soc_kwh": s.leave_soc.map(|e| e.kwh()),
                "slots": s.slots.map(|r| [r.start, r.last()]),
                "wait_min": s.wait,
                "charge_min": s.charge_time,
            })
        })
        .collect();
    json!({
        "nodes": p.stops.iter().map(|s| gtds.name(s.node)).collect::<Vec<_>>(),
        "total_min": p.total,
        "drive_min": p.drive,
        "charge_min": p.charge,
        "wait_min": p.wait,
        "stops": stops,
    })
}

pub fn table(gtds: &Gtds, t: &RoutingTable) -> Value {
    let kwh = |e: Option<perp_core::Energy>| e.map(|e| e.kwh());
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| {
            json!({
                "V": gtds.name(r.node),
                "anc": r.anc.map(|a| gtds.name(a)),
                "t_a": r.t_a,
                "soc_anc": kwh(r.soc_anc),
                "soc_a": kwh(r.soc_a),
                "soc_d": kwh(r.soc_d),
                "t_ch": r.t_ch,
                "t_d": r.t_d,
            })
        })
        .collect();
    Value::Array(rows)
}

pub fn report(r: &InfluenceReport) -> Value {
    let mut v = serde_json::to_value(r).expect("report serialises");
    v["refined_away"] = r.refined_away().into();
    v
}

pub fn plan(gtds: &Gtds, mode: &str, p: &Plan, explain: bool) -> Value {
    let mut out = json!({
        "mode": mode,
        "t_min": p.t_min,
        "path": path(gtds, &p.path),
        "candidates": p.candidates.len(),
        "chosen": p.chosen,
        "fallback": p.fallback,
        "overflow": p.overflow,
    });
    if explain {
        out["candidate_paths"] = p.candidates.iter().map(|c| path(gtds, c)).collect();
        out["influence"] = p.report.as_ref().map(report).unwrap_or(Value::Null);
    }
    out
}

pub fn summary(mode: &str, s: &Summary, refined_away: usize, fallbacks: usize) -> Value {
    json!({
        "mode": mode,
        "requests": s.requests,
        "feasible": s.feasible,
        "infeasible": s.requests - s.feasible,
        "sum_total_min": s.total_min,
        "avg_total_min": s.avg(s.total_min),
        "avg_drive_min": s.avg(s.drive_min),
        "avg_charge_min": s.avg(s.charge_min),
        "avg_wait_min": s.avg(s.wait_min),
        "avg_query_ms": s.avg_query_ms(),
        "refined_away": refined_away,
        "fallbacks": fallbacks,
    })
}
