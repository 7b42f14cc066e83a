//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{corridor, data, two_station, kwh, scenario, sim_params, simulate};
use perp_core::influence::{correlation, influence_factors};
use perp_core::io::{load_instance, read_json, RequestRecord};
use perp_core::oracle::{check_case, random_case, Verdict};
use perp_core::planner::{commit_plan, OcpProactive, PerturbedPredictor, PlanContext, Planner};
use perp_core::search::{backward_pass, forward_pass, ocp, simulate_path, ChargingPath, SearchConfig};
use perp_core::sim::{grid_instance, run_sweep, write_sweep_csv, GridSpec, StreamConfig, SweepConfig, TripSampler};
use perp_core::{NodeId, SlotRange};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
/// node, ancestor, t_a, soc_anc, soc_a, soc_d, t_ch, t_d; -1 marks an empty cell
type Row<S> = (S, S, i64, i64, i64, i64, i64, i64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Reference routing table for the two-station example, verbatim.
const REFERENCE_ROWS: [Row<&str>; 10] = [
    ("l1", "-", -1, -1, -1, 5, -1, 0),
    ("c1", "l1", 1, 5, 1, 3, 1, 2),
    ("c1", "l1", 1, 5, 1, 5, 2, 5),
    ("c2", "l1", 2, 5, 0, 3, 3, 7),
    ("c2", "l1", 2, 5, 0, 5, 5, 9),
    ("c2", "c1", 3, 3, 2, 3, 1, 5),
    ("c2", "c1", 3, 3, 2, 5, 3, 7),
    ("c2", "c1", 5, 5, 4, 5, 1, 6),
    ("l2", "c1", 6, 5, 1, -1, -1, 6),
    ("l2", "c2", 6, 3, 0, -1, -1, 6),
];

fn worked_example() -> Outcome {
    let started = Instant::now();
    let f = two_station();
    let g = &f.inst.gtds;
    let levels = f.lcb.levels(f.req.battery);
    let fwd = forward_pass(g, &f.trt, &f.req, &levels, &f.cfg, None).map_err(|e| e.to_string())?;
    let int = |e: Option<perp_core::Energy>| e.map_or(-1, |e| e.kwh().round() as i64);
    let got: Vec<Row<String>> = fwd
        .table
        .rows
        .iter()
        .map(|r| {
            (
                g.name(r.node).to_owned(),
                r.anc.map_or("-".to_owned(), |a| g.name(a).to_owned()),
                r.t_a.unwrap_or(-1),
                int(r.soc_anc),
                int(r.soc_a),
                int(r.soc_d),
                r.t_ch.unwrap_or(-1),
                r.t_d,
            )
        })
        .collect();
    let mut want: Vec<_> =
        REFERENCE_ROWS.iter().map(|r| (r.0.to_owned(), r.1.to_owned(), r.2, r.3, r.4, r.5, r.6, r.7)).collect();
    let mut got_sorted = got.clone();
    got_sorted.sort();
    want.sort();
    let bound = fwd.bound.ok_or("no upper bound")?;
    let bwd = backward_pass(g, &f.trt, &f.req, &fwd.table, bound, &f.cfg).map_err(|e| e.to_string())?;
    let seqs: Vec<Vec<&str>> = bwd.paths.iter().map(|p| p.stops.iter().map(|s| g.name(s.node)).collect()).collect();
    let elapsed = started.elapsed();

    let mut problems = Vec::new();
    if got_sorted != want {
        let missing: Vec<_> = want.iter().filter(|r| !got_sorted.contains(r)).collect();
        let extra: Vec<_> = got_sorted.iter().filter(|r| !want.contains(r)).collect();
        problems.push(format!(
            "table differs: reference rows not produced {missing:?}, produced rows not in the reference {extra:?}"
        ));
    }
    if fwd.best != Some(6) {
        problems.push(format!("ub = {:?}", fwd.best));
    }
    let expected_paths = vec![vec!["l1", "c1", "l2"], vec!["l1", "c1", "c2", "l2"]];
    let mut sorted_seqs = seqs.clone();
    sorted_seqs.sort();
    if sorted_seqs != expected_paths || bwd.paths.iter().any(|p| p.total != 6) {
        problems
            .push(format!("paths {seqs:?} with totals {:?}", bwd.paths.iter().map(|p| p.total).collect::<Vec<_>>()));
    }
    if elapsed >= Duration::from_secs(1) {
        problems.push(format!("took {elapsed:?}"));
    }
    if problems.is_empty() {
        Ok(format!("{} rows, ub 6, 2 paths of total 6 in {elapsed:?}", got.len()))
    } else {
        Err(problems.join("; "))
    }
}

fn fixed_path() -> Outcome {
    let inst = load_instance(&data("single_stop.json")).map_err(|e| e.to_string())?;
    let g = &inst.gtds;
    let trt = inst.trt(1, 16).map_err(|e| e.to_string())?;
    let req = read_json::<RequestRecord>(&data("single_stop_request.json")).unwrap().to_request(g).unwrap();
    let id = |n: &str| g.id_of(n).unwrap();
    let legs = [(id("v1"), None), (id("v2"), None), (id("c1"), Some(kwh(3.0))), (id("v4"), None)];
    let p = simulate_path(g, &trt, &req, &legs, 0).map_err(|e| e.to_string())?;
    ensure(p.total == 8, || format!("total {}", p.total))?;
    Ok(format!("total 8 (drive {}, charge {}, wait {})", p.drive, p.charge, p.wait))
}

fn correlation_example() -> Outcome {
    let path = |station: u32, first: i64, last: i64| ChargingPath {
        stops: Vec::new(),
        charging: vec![(NodeId(station), SlotRange::inclusive(first, last))],
        drive: 0,
        charge: 0,
        wait: 0,
        total: 0,
    };
    let p1 = path(0, 10, 14);
    let p2 = path(1, 10, 13);
    let p3 = path(0, 13, 16);
    let p4 = path(0, 15, 18);
    let co = [correlation(&p1, &p2), correlation(&p1, &p3), correlation(&p1, &p4)].map(u8::from);
    ensure(co == [0, 1, 0], || format!("co = {co:?}"))?;
    Ok("co = (0, 1, 0)".into())
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let (mut feasible, mut multi) = (0, 0);
    let seeds = 0..300u64;
    for seed in seeds.clone() {
        let case = random_case(seed);
        match check_case(&case) {
            Verdict::Agree { t_min: Some(_), schedules } => {
                feasible += 1;
                multi += usize::from(schedules > 1);
            }
            Verdict::Agree { .. } => {}
            Verdict::Disagree(why) => return Err(format!("seed {seed}: {why}")),
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} instances agree ({feasible} feasible, {multi} with several optimal schedules) in {elapsed:?}",
        seeds.end
    ))
}

fn refinement_soundness() -> Outcome {
    let (mut scenarios, mut pruned) = (0, 0);
    for seed in 0..400u64 {
        let Some(s) = scenario(seed) else { continue };
        let b = &s.built;
        let cfg = SearchConfig { epsilon: 3, ..b.cfg };
        let with = influence_factors(&b.gtds, &b.trt, &s.candidates, &s.futures, &b.lcb, &cfg, true);
        let without = influence_factors(&b.gtds, &b.trt, &s.candidates, &s.futures, &b.lcb, &cfg, false);
        if (&with.direct, &with.indirect) != (&without.direct, &without.indirect) {
            return Err(format!(
                "seed {seed}: pruned {:?}/{:?} vs full {:?}/{:?}",
                with.direct, with.indirect, without.direct, without.indirect
            ));
        }
        scenarios += 1;
        pruned += with.refined_away();
        if scenarios == 150 {
            break;
        }
    }
    ensure(scenarios >= 100, || format!("only {scenarios} scenarios"))?;
    Ok(format!("{scenarios} scenarios identical, {pruned} future searches cut short"))
}

fn optimality_preservation() -> Outcome {
    let c = corridor();
    let g = &c.inst.gtds;
    let params = sim_params();
    let planner = OcpProactive { lookahead: 25, epsilon: 10 };
    let mut plans = 0;
    let mut redirected = 0;
    for accuracy in [100, 95, 90] {
        let stream: Vec<_> = c.stream(11).into_iter().take(120).collect();
        let sampler = TripSampler::new(g, c.inst.metric, c.config.trip.clone(), c.config.vehicle.clone()).unwrap();
        let mut predictor = PerturbedPredictor::new(stream.clone(), accuracy, 7, sampler.resampler()).unwrap();
        let mut trt = params.fresh_trt(g).unwrap();
        for req in &stream {
            let slot = trt.slot_of(req.depart);
            if slot > trt.window_start() {
                trt.advance_window(slot).unwrap();
            }
            let ctx = PlanContext { gtds: g, trt: &trt, lcb: &params.lcb, search: &params.search };
            let plan = planner.plan(&ctx, req, Some(&mut predictor)).map_err(|e| format!("request {}: {e}", req.id))?;
            let reference = ocp(g, &trt, req, &params.lcb, &params.search).map_err(|e| e.to_string())?;
            ensure(plan.path.total == reference.t_min, || {
                format!(
                    "accuracy {accuracy}, request {}: chose {} but t_min is {}",
                    req.id, plan.path.total, reference.t_min
                )
            })?;
            redirected += usize::from(plan.chosen != 0);
            plans += 1;
            commit_plan(&mut trt, req.id, &plan.path).map_err(|e| e.to_string())?;
        }
    }
    ensure(plans >= 100, || format!("only {plans} plans"))?;
    Ok(format!("{plans} proactive plans optimal, {redirected} chose a path other than the first"))
}

fn grid_stream(seed: u64, count: usize) -> (perp_core::Gtds, Vec<perp_core::search::RoutingRequest>) {
    let inst = grid_instance(&GridSpec { seed, ..GridSpec::default() }).unwrap().build().unwrap();
    let cfg = StreamConfig { max_requests: Some(count), ..StreamConfig::sds(seed) };
    let stream = perp_core::sim::generate_stream(&inst.gtds, inst.metric, &cfg).unwrap();
    (inst.gtds, stream)
}

fn ordering() -> Outcome {
    let params = sim_params();
    let mut lines = Vec::new();
    let total = |g: &perp_core::Gtds, s: &[perp_core::search::RoutingRequest], mode: &str| {
        let out = simulate(g, s, mode, &params);
        out.trt.audit().expect("audit");
        let sum = out.metrics.summary();
        (sum.total_min, sum.feasible)
    };
    for seed in 0..2 {
        let (g, s) = grid_stream(seed, 200);
        let (nw, f1) = total(&g, &s, "bnb-nw");
        let (o, f2) = total(&g, &s, "ocp");
        let (full, f3) = total(&g, &s, "ocp-f");
        ensure(f1 == f2 && f2 == f3, || format!("grid seed {seed}: feasible counts {f1}/{f2}/{f3} differ"))?;
        ensure(nw <= o && o <= full, || format!("grid seed {seed}: B&B-NW {nw}, OCP {o}, OCP-F {full}"))?;
        lines.push(format!("grid{seed} {nw}<={o}<={full}"));
    }
    let c = corridor();
    let g = &c.inst.gtds;
    let mut strict = 0;
    for seed in 1..=5 {
        let s = c.stream(seed);
        ensure(s.len() >= 200, || format!("corridor seed {seed}: {} requests", s.len()))?;
        let (nw, _) = total(g, &s, "bnb-nw");
        let (o, _) = total(g, &s, "ocp");
        let (full, _) = total(g, &s, "ocp-f");
        let (po, _) = total(g, &s, "ocp-po");
        ensure(nw <= o && o <= full, || format!("corridor seed {seed}: B&B-NW {nw}, OCP {o}, OCP-F {full}"))?;
        ensure(po <= o, || format!("corridor seed {seed}: OCP-PO(25) {po} > OCP {o}"))?;
        strict += usize::from(po < o);
        lines.push(format!("corridor{seed} PO {po} vs OCP {o}"));
    }
    ensure(strict >= 1, || "OCP-PO(25) never beat OCP".into())?;

    let (g, _) = grid_stream(0, 0);
    let cfg = SweepConfig {
        ev_counts: vec![20, 40],
        distances_km: vec![200.0, 400.0],
        lcbs: vec![perp_core::search::Lcb::full(), perp_core::search::Lcb::default()],
        slot_minutes: vec![5, 10],
        base_count: 30,
        ..SweepConfig::default()
    };
    let rows =
        run_sweep(&g, perp_core::gtds::Metric::Euclidean, &cfg, &Default::default()).map_err(|e| e.to_string())?;
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv).map_err(|e| e.to_string())?;
    let axes: BTreeSet<&str> = rows.iter().map(|r| r.axis.as_str()).collect();
    ensure(axes.len() == 4 && rows.len() == 16, || format!("sweep axes {axes:?}, {} rows", rows.len()))?;
    Ok(format!("{}; strict on {strict}/5; sweep {} rows", lines.join(", "), rows.len()))
}

fn ledger_integrity() -> Outcome {
    let c = corridor();
    let g = &c.inst.gtds;
    let mut checked = 0;
    for mode in ["ocp", "ocp-f", "ocp-oc", "ocp-ocs", "ocp-po", "bnb-nw"] {
        let out = simulate(g, &c.stream(3), mode, &sim_params());
        out.trt.audit().map_err(|e| format!("{mode}: {e}"))?;
        // every free slot of every station in a stretch of the window round-trips
        let mut trt = out.trt.clone();
        for station in g.stations().map(|s| s.id) {
            for slot in trt.window_start()..trt.window_start() + 60 {
                if !trt.is_available(station, slot).unwrap() {
                    let conflict = trt.reserve(u64::MAX - 1, station, SlotRange::new(slot, slot + 1));
                    ensure(conflict.is_err() && trt.table_eq(&out.trt), || format!("{mode}: double booking accepted"))?;
                    continue;
                }
                let token =
                    trt.reserve(u64::MAX - 1, station, SlotRange::new(slot, slot + 1)).map_err(|e| e.to_string())?;
                trt.release(token).map_err(|e| e.to_string())?;
                ensure(trt.table_eq(&out.trt), || format!("{mode}: round trip at slot {slot} changed the table"))?;
                checked += 1;
            }
        }
        trt.audit().map_err(|e| format!("{mode} after round trips: {e}"))?;
    }
    Ok(format!("6 runs audited, {checked} reserve/release round trips restore the table"))
}

fn determinism() -> Outcome {
    let run = || {
        let (g, s) = grid_stream(4, 150);
        let mut bytes = Vec::new();
        for mode in ["ocp", "ocp-po", "ocp-ocs"] {
            simulate(&g, &s, mode, &sim_params()).metrics.write_csv(&mut bytes).unwrap();
        }
        bytes
    };
    let a = run();
    let b = run();
    ensure(a == b, || "metrics CSVs differ between identical runs".into())?;
    Ok(format!("{} identical bytes over 3 modes", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("worked example routing table and paths", worked_example),
        ("fixed path simulation", fixed_path),
        ("correlation example", correlation_example),
        ("brute-force equivalence", oracle_equivalence),
        ("refinement soundness", refinement_soundness),
        ("individual optimality under prediction", optimality_preservation),
        ("ordering invariants and sweep", ordering),
        ("ledger integrity", ledger_integrity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
