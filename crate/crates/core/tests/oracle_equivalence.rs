mod common;

use std::collections::BTreeSet;

use common::build_case;
use perp_core::oracle::{brute_force_ocp, random_case};
use perp_core::search::{ocp, SearchError};

#[test]
fn engine_matches_brute_force_on_random_instances() {
    let mut feasible = 0;
    let mut multi = 0;
    for seed in 0..300 {
        let case = random_case(seed);
        let b = build_case(&case);
        let levels = b.lcb.levels(b.req.battery);
        let truth = brute_force_ocp(&b.gtds, &b.trt, &b.req, &levels, b.cfg.overhead, case.horizon).unwrap();
        let got = ocp(&b.gtds, &b.trt, &b.req, &b.lcb, &b.cfg);
        match truth.t_min {
            Some(t) => {
                let res = got.unwrap_or_else(|e| panic!("seed {seed}: engine failed with {e}, oracle found {t}"));
                assert_eq!(res.t_min, t, "seed {seed}");
                assert!(!res.overflow, "seed {seed}");
                let keys: BTreeSet<_> = res.paths.iter().map(|p| p.schedule_key()).collect();
                assert_eq!(keys.len(), res.paths.len(), "seed {seed}: duplicate paths");
                assert_eq!(keys, truth.schedules, "seed {seed}");
                for p in &res.paths {
                    p.check(&b.gtds, &b.req, &levels).unwrap();
                }
                feasible += 1;
                if keys.len() > 1 {
                    multi += 1;
                }
            }
            None => match got {
                Err(SearchError::Unreachable(_)) => {}
                Ok(res) => assert!(b.req.depart + res.t_min > case.horizon * case.slot_minutes, "seed {seed}"),
                Err(e) => panic!("seed {seed}: {e}"),
            },
        }
    }
    assert!(feasible >= 100, "only {feasible} feasible cases");
    assert!(multi >= 10, "only {multi} cases with several optimal schedules");
}
