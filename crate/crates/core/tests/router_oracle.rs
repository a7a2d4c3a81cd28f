use cctv_core::exposure::{annotate_graph, ExposureParams};
use cctv_core::router::{self, CostParams, RouteError, RouteMode, RouteRequest};
use cctv_testkit::{fixtures, route_oracle};
use rand::rngs::StdRng;
use rand::SeedableRng;

const MODES: [RouteMode; 3] = [RouteMode::Default, RouteMode::Privacy, RouteMode::Safety];

#[test]
fn route_cost_equals_exhaustive_minimum() {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut routed = 0;
    let mut unreachable = 0;
    for case in 0..100 {
        let net = fixtures::random_network(&mut rng, 12);
        let map = annotate_graph(&net.graph, &net.cameras, &ExposureParams::default()).unwrap();
        let origin = net.graph.snap(net.from).unwrap();
        let destination = net.graph.snap(net.to).unwrap();
        for mode in MODES {
            let params = CostParams::default();
            let req = RouteRequest::new(net.from, net.to, mode).with_params(params);
            let want = route_oracle::min_cost(&net.graph, &map, mode, &params, &origin, &destination);
            match (router::shortest_route(&net.graph, &map, &req), want) {
                (Ok(r), Some(best)) => {
                    assert_eq!(r.total_cost, best, "case {case} {mode:?}");
                    let legs: f64 = r.legs.iter().map(|l| l.cost).sum();
                    assert!((legs - best).abs() <= 1e-9 * best.max(1.0));
                    routed += 1;
                }
                (Err(RouteError::NoPath), None) => unreachable += 1,
                (got, want) => panic!("case {case} {mode:?}: {got:?} vs oracle {want:?}"),
            }
        }
    }
    assert!(routed > 200, "too few routable cases: {routed}");
    assert!(unreachable > 0, "generator never produced a disconnected case");
}

#[test]
fn random_parameters_still_optimal() {
    use rand::Rng;
    let mut rng = StdRng::seed_from_u64(99);
    for case in 0..60 {
        let net = fixtures::random_network(&mut rng, 10);
        let map = annotate_graph(&net.graph, &net.cameras, &ExposureParams::default()).unwrap();
        let origin = net.graph.snap(net.from).unwrap();
        let destination = net.graph.snap(net.to).unwrap();
        let params = CostParams {
            lambda: rng.gen_range(0.0..30.0),
            beta: rng.gen_range(0.0..0.9),
            camera_penalty_m: rng.gen_range(0.0..200.0),
        };
        for mode in MODES {
            let req = RouteRequest::new(net.from, net.to, mode).with_params(params);
            let got = router::shortest_route(&net.graph, &map, &req)
                .ok()
                .map(|r| r.total_cost);
            let want = route_oracle::min_cost(&net.graph, &map, mode, &params, &origin, &destination);
            assert_eq!(got, want, "case {case} {mode:?}");
        }
    }
}
