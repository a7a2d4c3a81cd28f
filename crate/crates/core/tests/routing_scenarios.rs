use cctv_core::exposure::{annotate_graph, ExposureMap, ExposureParams};
use cctv_core::graph::RoadGraph;
use cctv_core::router::{self, CostParams, RouteMode, RouteRequest};
use cctv_core::GeoPoint;
use cctv_testkit::fixtures;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn grid_case() -> (RoadGraph, ExposureMap, GeoPoint, GeoPoint) {
    let g = fixtures::grid(5);
    let m = annotate_graph(&g, &fixtures::corridor_cameras(), &ExposureParams::default()).unwrap();
    (g, m, fixtures::grid_point(2.0, 0.0), fixtures::grid_point(2.0, 4.0))
}

#[test]
fn privacy_route_avoids_covered_corridor() {
    let (g, m, from, to) = grid_case();
    let (default, d) = router::route(&g, &m, &RouteRequest::new(from, to, RouteMode::Default)).unwrap();
    let (privacy, p) = router::route(&g, &m, &RouteRequest::new(from, to, RouteMode::Privacy)).unwrap();
    assert!(d.exposed_m > 0.0);
    assert_eq!(d.distinct_cameras, 2);
    assert!((default.total_m - 400.0).abs() < 0.5, "{}", default.total_m);
    assert_eq!(p.exposed_m, 0.0);
    assert_eq!(p.distinct_cameras, 0);
    assert!(p.detour_ratio > 1.0);
    assert!((privacy.total_m - 600.0).abs() < 1.0, "{}", privacy.total_m);
}

#[test]
fn safety_route_prefers_the_corridor() {
    let (g, m, from, to) = grid_case();
    let (_, s) = router::route(&g, &m, &RouteRequest::new(from, to, RouteMode::Safety)).unwrap();
    assert!(s.exposed_m > 0.0);
    assert_eq!(s.detour_ratio, 1.0);
}

fn fixtures_for_degeneracy() -> Vec<(RoadGraph, ExposureMap, GeoPoint, GeoPoint)> {
    let mut out = vec![grid_case()];
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..60 {
        let net = fixtures::random_network(&mut rng, 12);
        let m = annotate_graph(&net.graph, &net.cameras, &ExposureParams::default()).unwrap();
        out.push((net.graph, m, net.from, net.to));
    }
    out
}

#[test]
fn zero_weights_reduce_to_default() {
    for (g, m, from, to) in fixtures_for_degeneracy() {
        let base = router::shortest_route(&g, &m, &RouteRequest::new(from, to, RouteMode::Default));
        let flat = CostParams {
            lambda: 0.0,
            beta: 0.0,
            camera_penalty_m: 0.0,
        };
        for mode in [RouteMode::Privacy, RouteMode::Safety] {
            let r = router::shortest_route(&g, &m, &RouteRequest::new(from, to, mode).with_params(flat));
            match (&base, r) {
                (Ok(b), Ok(r)) => assert_eq!(r.total_cost, b.total_cost),
                (Err(a), Err(b)) => assert_eq!(*a, b),
                (a, b) => panic!("{a:?} vs {b:?}"),
            }
        }
    }
}

#[test]
fn exposure_non_increasing_in_lambda() {
    for (g, m, from, to) in fixtures_for_degeneracy() {
        let mut last = f64::INFINITY;
        for lambda in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0] {
            let params = CostParams {
                lambda,
                ..CostParams::default()
            };
            let req = RouteRequest::new(from, to, RouteMode::Privacy).with_params(params);
            let Ok((_, rep)) = router::route(&g, &m, &req) else {
                break;
            };
            assert!(
                rep.exposed_m <= last + 1e-6,
                "lambda {lambda}: {} > {last}",
                rep.exposed_m
            );
            last = rep.exposed_m;
        }
    }
}

#[test]
fn route_geometry_runs_between_snaps() {
    for (g, m, from, to) in fixtures_for_degeneracy() {
        let Ok((r, rep)) = router::route(&g, &m, &RouteRequest::new(from, to, RouteMode::Privacy)) else {
            continue;
        };
        assert!(r.geometry.len() >= 2);
        assert!(cctv_core::geo::haversine_m(r.geometry[0], r.origin.snapped) < 1e-3);
        assert!(cctv_core::geo::haversine_m(*r.geometry.last().unwrap(), r.destination.snapped) < 1e-3);
        assert!(rep.detour_ratio >= 1.0 - 1e-12, "{rep:?} {:?}", r.legs);
        assert!((0.0..=1.0 + 1e-12).contains(&rep.exposure_share));
    }
}
