#![allow(dead_code)]

use std::path::PathBuf;

use perp_core::io::{load_instance, read_json, Instance, RequestRecord};
use perp_core::search::{Lcb, RoutingRequest, SearchConfig};
use perp_core::{Energy, Trt};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn kwh(v: f64) -> Energy {
    Energy::from_kwh(v)
}

/// The two-station worked example: one-minute slots, buckets {3, 5}.
pub struct TwoStation {
    pub inst: Instance,
    pub trt: Trt,
    pub req: RoutingRequest,
    pub lcb: Lcb,
    pub cfg: SearchConfig,
}

pub fn two_station() -> TwoStation {
    let inst = load_instance(&data("two_station.json")).unwrap();
    let trt = inst.trt(1, 64).unwrap();
    let req = read_json::<RequestRecord>(&data("two_station_request.json")).unwrap().to_request(&inst.gtds).unwrap();
    TwoStation { inst, trt, req, lcb: Lcb::new(vec![60, 100]).unwrap(), cfg: SearchConfig::default() }
}

use perp_core::oracle::RandomCase;
use perp_core::Gtds;

pub struct Built {
    pub gtds: Gtds,
    pub trt: Trt,
    pub req: RoutingRequest,
    pub lcb: Lcb,
    pub cfg: SearchConfig,
}

pub fn build_case(case: &RandomCase) -> Built {
    let inst = case.instance.build().unwrap();
    let trt = inst.trt(case.slot_minutes, 64).unwrap();
    let req = case.request.to_request(&inst.gtds).unwrap();
    let cfg = SearchConfig { overhead: case.overhead, ..SearchConfig::default() };
    Built { gtds: inst.gtds, trt, req, lcb: Lcb::new(case.lcb.clone()).unwrap(), cfg }
}

use perp_core::planner::{OraclePredictor, PlannerOptions, PlannerRegistry};
use perp_core::sim::{generate_stream, run_simulation, SimOutcome, SimParams, StreamConfig};

/// Three interchangeable stations for through traffic, one of which is the
/// only option for a second, short trip.
pub struct Corridor {
    pub inst: Instance,
    pub config: StreamConfig,
}

pub fn corridor() -> Corridor {
    let inst = load_instance(&data("corridor.json")).unwrap();
    let config = read_json::<StreamConfig>(&data("corridor_stream.json")).unwrap();
    Corridor { inst, config }
}

impl Corridor {
    pub fn stream(&self, seed: u64) -> Vec<RoutingRequest> {
        let cfg = StreamConfig { seed, ..self.config.clone() };
        generate_stream(&self.inst.gtds, self.inst.metric, &cfg).unwrap()
    }
}

pub fn sim_params() -> SimParams {
    SimParams { timing: false, ..SimParams::default() }
}

/// Run `mode` over `stream` from an empty table with a perfect predictor.
pub fn simulate(gtds: &Gtds, stream: &[RoutingRequest], mode: &str, params: &SimParams) -> SimOutcome {
    let planner = PlannerRegistry::standard().create(mode, &PlannerOptions::default()).unwrap();
    let mut predictor = OraclePredictor::new(stream.to_vec());
    let trt = params.fresh_trt(gtds).unwrap();
    run_simulation(gtds, trt, stream, planner.as_ref(), Some(&mut predictor), params).unwrap()
}

use perp_core::oracle::random_case;
use perp_core::search::{ocp, ChargingPath};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random small case, its optimal paths as candidates, and a handful of
/// future requests over the same landmarks with scattered departures.
pub struct Scenario {
    pub built: Built,
    pub candidates: Vec<ChargingPath>,
    pub futures: Vec<RoutingRequest>,
}

pub fn scenario(seed: u64) -> Option<Scenario> {
    let built = build_case(&random_case(seed));
    let candidates = ocp(&built.gtds, &built.trt, &built.req, &built.lcb, &built.cfg).ok()?.paths;
    if candidates.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let battery = built.req.battery.kwh() as i64;
    let futures = (0..6)
        .map(|i| RoutingRequest {
            id: 1000 + i,
            depart: rng.random_range(0..25),
            soc: Energy::from_kwh(rng.random_range(1..=battery) as f64),
            vehicle_rate_kw: 60.0 * rng.random_range(1..=3) as f64,
            ..built.req.clone()
        })
        .collect();
    Some(Scenario { built, candidates, futures })
}
