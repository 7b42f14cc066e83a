mod common;

use common::{corridor, scenario, sim_params};
use perp_core::planner::{
    commit_plan, select_min_charge_time, unused_charging_potential, OcpProactive, OraclePredictor, PlanContext,
    Planner, PlannerOptions, PlannerRegistry, Predictor, PredictorError,
};
use perp_core::search::{ocp, RoutingRequest};

struct Broken;

impl Predictor for Broken {
    fn next_requests(&mut self, current: &RoutingRequest, _: usize) -> Result<Vec<RoutingRequest>, PredictorError> {
        Err(PredictorError::UnknownRequest(current.id))
    }
}

fn registry_plan(mode: &str, s: &common::Scenario) -> perp_core::planner::Plan {
    let b = &s.built;
    let ctx = PlanContext { gtds: &b.gtds, trt: &b.trt, lcb: &b.lcb, search: &b.cfg };
    let planner = PlannerRegistry::standard().create(mode, &PlannerOptions { lookahead: 6, epsilon: 3 }).unwrap();
    let mut stream = vec![b.req.clone()];
    stream.extend(s.futures.iter().cloned());
    let mut predictor = OraclePredictor::new(stream);
    planner.plan(&ctx, &b.req, Some(&mut predictor)).unwrap()
}

#[test]
fn every_mode_except_full_charge_returns_an_optimal_path() {
    for seed in 0..120 {
        let Some(s) = scenario(seed) else { continue };
        let b = &s.built;
        let t = ocp(&b.gtds, &b.trt, &b.req, &b.lcb, &b.cfg).unwrap().t_min;
        for mode in ["ocp", "ocp-oc", "ocp-ocs", "ocp-po"] {
            let plan = registry_plan(mode, &s);
            assert_eq!(plan.path.total, t, "seed {seed} {mode}");
            assert_eq!(plan.path, plan.candidates[plan.chosen]);
            plan.path.check(&b.gtds, &b.req, &b.lcb.levels(b.req.battery)).unwrap();
        }
        assert!(registry_plan("ocp-f", &s).path.total >= t);
        assert!(registry_plan("bnb-nw", &s).path.total <= t);
    }
}

#[test]
fn selection_rules() {
    let mut differed = 0;
    for seed in 0..300 {
        let Some(s) = scenario(seed) else { continue };
        let b = &s.built;
        let oc = registry_plan("ocp-oc", &s);
        assert_eq!(oc.chosen, select_min_charge_time(&oc.candidates));
        assert!(oc.candidates.iter().all(|p| p.charge >= oc.path.charge));
        let ocs = registry_plan("ocp-ocs", &s);
        let slot = b.trt.slot_minutes();
        let waste = |p| unused_charging_potential(p, &b.gtds, b.req.vehicle_rate_kw, slot);
        assert!(ocs.candidates.iter().all(|p| waste(p) >= waste(&ocs.path)));
        let po = registry_plan("ocp-po", &s);
        if let Some(report) = &po.report {
            assert_eq!(Some(po.chosen), report.argmin());
            differed += usize::from(po.chosen != 0);
        } else {
            assert_eq!(po.chosen, 0);
        }
    }
    assert!(differed > 0, "the proactive choice never left the first path");
}

#[test]
fn zero_lookahead_and_failed_prediction_fall_back_to_the_first_path() {
    for seed in 0..60 {
        let Some(s) = scenario(seed) else { continue };
        let b = &s.built;
        let ctx = PlanContext { gtds: &b.gtds, trt: &b.trt, lcb: &b.lcb, search: &b.cfg };
        let first = ocp(&b.gtds, &b.trt, &b.req, &b.lcb, &b.cfg).unwrap().paths.remove(0);
        let none = OcpProactive { lookahead: 0, epsilon: 3 }.plan(&ctx, &b.req, Some(&mut Broken)).unwrap();
        assert_eq!((none.path.clone(), none.fallback), (first.clone(), false));
        let broken = OcpProactive { lookahead: 5, epsilon: 3 }.plan(&ctx, &b.req, Some(&mut Broken)).unwrap();
        assert_eq!((broken.path.clone(), broken.fallback), (first.clone(), true));
        let missing = OcpProactive { lookahead: 5, epsilon: 3 }.plan(&ctx, &b.req, None).unwrap();
        assert!(missing.fallback && missing.path == first);
    }
}

#[test]
fn commits_are_atomic_and_reversible() {
    let c = corridor();
    let g = &c.inst.gtds;
    let params = sim_params();
    let mut trt = params.fresh_trt(g).unwrap();
    let stream = c.stream(2);
    let ctx_plan = |trt: &perp_core::Trt, req: &RoutingRequest| {
        let ctx = PlanContext { gtds: g, trt, lcb: &params.lcb, search: &params.search };
        perp_core::planner::Ocp.plan(&ctx, req, None).unwrap()
    };
    let before = trt.clone();
    let plan = ctx_plan(&trt, &stream[0]);
    assert!(!plan.path.charging.is_empty());
    let token = commit_plan(&mut trt, stream[0].id, &plan.path).unwrap();
    let after = trt.clone();
    // the same slots cannot be taken twice, and a failed commit changes nothing
    assert!(commit_plan(&mut trt, stream[1].id, &plan.path).is_err());
    assert!(trt.table_eq(&after));
    trt.release(token).unwrap();
    assert!(trt.table_eq(&before));
    trt.audit().unwrap();
}
