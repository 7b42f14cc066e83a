use perp_core::gtds::{GraphParams, LandmarkSpec, Metric, Point, StationSpec};
use perp_core::Gtds;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scatter(seed: u64, stations: usize, landmarks: usize) -> (Vec<StationSpec>, Vec<LandmarkSpec>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pt = || Point::new(rng.random_range(0.0..400.0), rng.random_range(0.0..400.0));
    let st = (0..stations).map(|i| StationSpec { name: format!("c{i}"), pos: pt(), rate_kw: 50.0 }).collect();
    let lm = (0..landmarks).map(|i| LandmarkSpec { name: format!("l{i}"), pos: pt() }).collect();
    (st, lm)
}

#[test]
fn edge_count_matches_pairwise_scan() {
    let params = GraphParams::default();
    for seed in 0..10 {
        let (st, lm) = scatter(seed, 20, 6);
        let g = Gtds::from_geometry(&st, &lm, &params).unwrap();
        let pos: Vec<(Point, bool)> =
            st.iter().map(|s| (s.pos, true)).chain(lm.iter().map(|l| (l.pos, false))).collect();
        let mut expected = 0;
        for (i, &(a, a_st)) in pos.iter().enumerate() {
            for (j, &(b, b_st)) in pos.iter().enumerate() {
                let d = Metric::Euclidean.distance_km(a, b);
                if i != j && (a_st || b_st) && d * params.consumption_kwh_per_km <= params.max_range_kwh {
                    expected += 1;
                }
            }
        }
        assert_eq!(g.edge_count(), expected, "seed {seed}");
        for node in g.nodes() {
            let targets: Vec<_> = g.out_edges(node.id).map(|e| e.to).collect();
            assert!(targets.windows(2).all(|w| w[0] < w[1]), "out edges sorted and unique");
            for e in g.out_edges(node.id) {
                assert!(g.in_edges(e.to).any(|r| r.from == node.id && r.w == e.w && r.u == e.u));
            }
        }
    }
}

#[test]
fn snapping_matches_linear_scan() {
    let (st, lm) = scatter(42, 5, 30);
    let g = Gtds::from_geometry(&st, &lm, &GraphParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let p = Point::new(rng.random_range(-50.0..450.0), rng.random_range(-50.0..450.0));
        let got = g.nearest_landmark(p, Metric::Euclidean).unwrap();
        let best = g.landmarks().map(|l| Metric::Euclidean.distance_km(p, l.pos)).fold(f64::INFINITY, f64::min);
        assert_eq!(Metric::Euclidean.distance_km(p, g.node(got).pos), best);
        assert!(!g.is_station(got));
    }
}

#[test]
fn node_ids_put_stations_first() {
    let (st, lm) = scatter(3, 4, 3);
    let g = Gtds::from_geometry(&st, &lm, &GraphParams::default()).unwrap();
    let kinds: Vec<bool> = g.nodes().iter().map(|n| n.is_station()).collect();
    assert_eq!(kinds, [true, true, true, true, false, false, false]);
    assert_eq!(g.name(g.id_of("l1").unwrap()), "l1");
}
