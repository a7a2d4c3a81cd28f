//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Run with `cargo test -p cctv --test acceptance`.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cctv::formats::registry::{Registry, RegistryEntry};
use cctv::formats::{graph_json, osm};
use cctv_core::camera::{Camera, CameraKind};
use cctv_core::eval::{self, BBox, EvalConfig, Interpolation, SizeBucket};
use cctv_core::exposure::{annotate_graph, BufferPolicy, ExposureMap, ExposureParams};
use cctv_core::graph::{EdgeId, EdgeSpec, GraphBuilder, RoadGraph};
use cctv_core::localize::{self, LocalizerConfig, Observation};
use cctv_core::router::{self, CostParams, RouteMode, RouteRequest};
use cctv_core::GeoPoint;
use cctv_testkit::coco_oracle::{self, Integration, Scope};
use cctv_testkit::{cluster_oracle, fixtures, route_oracle};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn f1_identities() -> Outcome {
    let a = eval::f1_score(33, 0, 6).map_err(|e| e.to_string())?;
    let b = eval::f1_score(35, 0, 4).map_err(|e| e.to_string())?;
    check((a - 0.9167).abs() <= 0.0005, || format!("f1(33,0,6) = {a:.6}"))?;
    check((b - 0.9459).abs() <= 0.0005, || format!("f1(35,0,4) = {b:.6}"))?;
    Ok(format!("f1(33,0,6)={a:.4}, f1(35,0,4)={b:.4}, tol 0.0005"))
}

fn fusion_reproduction() -> Outcome {
    let (gts, a, b) = fixtures::fusion_instance();
    let cfg = EvalConfig::default();
    let only_a = eval::evaluate(&a, &gts, &cfg).map_err(|e| e.to_string())?.counts;
    check((only_a.tp, only_a.fp, only_a.fn_) == (33, 0, 6), || {
        format!("detector A alone: {}/{}/{}", only_a.tp, only_a.fp, only_a.fn_)
    })?;
    let fused = eval::fuse(&a, &b, 0.5);
    let c = eval::evaluate(&fused, &gts, &cfg).map_err(|e| e.to_string())?.counts;
    check((c.tp, c.fp, c.fn_) == (35, 0, 4), || {
        format!("fused: tp={} fp={} fn={}", c.tp, c.fp, c.fn_)
    })?;
    Ok(format!(
        "{} GT; A 33/0/6 -> fused tp={} fp={} fn={}",
        gts.len(),
        c.tp,
        c.fp,
        c.fn_
    ))
}

fn metrics_oracle() -> Outcome {
    const TOL: f64 = 1e-9;
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    for case in 0..500 {
        let (dets, gts) = fixtures::random_eval_instance(&mut rng);
        let cfg = EvalConfig::default();
        let report = eval::evaluate(&dets, &gts, &cfg).map_err(|e| format!("case {case}: {e}"))?;
        coco_oracle::compare(&report, &coco_oracle::evaluate(&dets, &gts, &cfg), TOL)
            .map_err(|e| format!("case {case}: {e}"))?;
        for thr in [0.5, 0.75] {
            for (interp, integ) in [
                (Interpolation::Coco101, Integration::Points101),
                (Interpolation::AllPoint, Integration::Area),
            ] {
                let got = eval::average_precision_with(&dets, &gts, thr, &cfg, interp).ok();
                let want = coco_oracle::average_precision(
                    &dets,
                    &gts,
                    Scope::PerCategory,
                    thr,
                    cfg.max_dets_per_image,
                    cfg.size_filter,
                    integ,
                );
                match (got, want) {
                    (None, None) => {}
                    (Some(a), Some(b)) => {
                        worst = worst.max((a - b).abs());
                        compared += 1;
                    }
                    _ => return Err(format!("case {case}: AP definedness {got:?} vs oracle {want:?}")),
                }
            }
        }
    }
    check(worst <= TOL, || format!("max |AP - oracle| = {worst:e}"))?;
    Ok(format!(
        "500 instances, {compared} AP values, max diff {worst:.1e} <= 1e-9"
    ))
}

fn size_buckets() -> Outcome {
    let bucket = |s: f64| eval::size_bucket(&BBox::new(0.0, 0.0, s, s).unwrap());
    let cases = [
        (31.0, SizeBucket::Small),
        (32.0, SizeBucket::Medium),
        (96.0, SizeBucket::Medium),
        (97.0, SizeBucket::Large),
    ];
    for (s, want) in cases {
        let got = bucket(s);
        check(got == want, || format!("{s}x{s} -> {got:?}, expected {want:?}"))?;
    }
    Ok("31->small, 32->medium, 96->medium, 97->large".into())
}

fn router_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let (mut routed, mut unreachable) = (0, 0);
    for case in 0..100 {
        let net = fixtures::random_network(&mut rng, 12);
        let map = annotate_graph(&net.graph, &net.cameras, &ExposureParams::default()).map_err(|e| e.to_string())?;
        let origin = net.graph.snap(net.from).map_err(|e| e.to_string())?;
        let destination = net.graph.snap(net.to).map_err(|e| e.to_string())?;
        for mode in [RouteMode::Default, RouteMode::Privacy, RouteMode::Safety] {
            let params = CostParams::default();
            let req = RouteRequest::new(net.from, net.to, mode).with_params(params);
            let got = router::shortest_route(&net.graph, &map, &req)
                .ok()
                .map(|r| r.total_cost);
            let want = route_oracle::min_cost(&net.graph, &map, mode, &params, &origin, &destination);
            check(got == want, || {
                format!("case {case} {mode:?}: {got:?} vs oracle {want:?}")
            })?;
            if got.is_some() {
                routed += 1;
            } else {
                unreachable += 1;
            }
        }
    }
    Ok(format!(
        "100 graphs x 3 modes: {routed} routes exact, {unreachable} unreachable agreed"
    ))
}

fn grid_case() -> (RoadGraph, ExposureMap, GeoPoint, GeoPoint) {
    let g = fixtures::grid(5);
    let m = annotate_graph(&g, &fixtures::corridor_cameras(), &ExposureParams::default()).unwrap();
    (g, m, fixtures::grid_point(2.0, 0.0), fixtures::grid_point(2.0, 4.0))
}

fn privacy_avoidance() -> Outcome {
    let (g, m, from, to) = grid_case();
    let (_, d) = router::route(&g, &m, &RouteRequest::new(from, to, RouteMode::Default)).map_err(|e| e.to_string())?;
    let (_, p) = router::route(&g, &m, &RouteRequest::new(from, to, RouteMode::Privacy)).map_err(|e| e.to_string())?;
    check(p.exposed_m == 0.0, || format!("privacy exposed_m = {}", p.exposed_m))?;
    check(d.exposed_m > 0.0, || "default route is not exposed".into())?;
    check(p.detour_ratio > 1.0, || format!("detour_ratio = {}", p.detour_ratio))?;
    Ok(format!(
        "default exposed {:.1} m; privacy exposed 0 m, detour_ratio {:.3}",
        d.exposed_m, p.detour_ratio
    ))
}

fn mode_degeneracy() -> Outcome {
    let mut cases = vec![grid_case()];
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..100 {
        let net = fixtures::random_network(&mut rng, 12);
        let m = annotate_graph(&net.graph, &net.cameras, &ExposureParams::default()).unwrap();
        cases.push((net.graph, m, net.from, net.to));
    }
    let defaults = CostParams::default();
    let privacy = CostParams {
        lambda: 0.0,
        camera_penalty_m: 0.0,
        ..defaults
    };
    let safety = CostParams { beta: 0.0, ..defaults };
    let mut compared = 0;
    for (i, (g, m, from, to)) in cases.iter().enumerate() {
        let base = router::shortest_route(g, m, &RouteRequest::new(*from, *to, RouteMode::Default))
            .ok()
            .map(|r| r.total_cost);
        for (mode, params) in [(RouteMode::Privacy, privacy), (RouteMode::Safety, safety)] {
            let got = router::shortest_route(g, m, &RouteRequest::new(*from, *to, mode).with_params(params))
                .ok()
                .map(|r| r.total_cost);
            check(got == base, || {
                format!("fixture {i} {mode:?}: {got:?} vs default {base:?}")
            })?;
            compared += 1;
        }
    }
    Ok(format!("{} fixtures, {compared} comparisons, exact", cases.len()))
}

fn bearing(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (p1, p2) = (a.0.to_radians(), b.0.to_radians());
    let dl = (b.1 - a.1).to_radians();
    let y = dl.sin() * p2.cos();
    let x = p1.cos() * p2.sin() - p1.sin() * p2.cos() * dl.cos();
    y.atan2(x).to_degrees().rem_euclid(360.0)
}

fn sighting(observer: GeoPoint, heading: f64, range: f64, gps: f64) -> Observation {
    Observation {
        observer,
        gps_sigma_m: gps,
        heading_deg: heading,
        range_m: range,
        range_sigma_m: 0.002,
        kind: CameraKind::Directed,
        score: 0.8,
        timestamp: 0.0,
        image_ref: "frame".into(),
    }
}

fn localizer() -> Outcome {
    let cfg = LocalizerConfig::default();
    let mut rng = StdRng::seed_from_u64(1);
    let (mut worst, mut n): (f64, usize) = (0.0, 0);
    while n < 2000 {
        let (lat, lon) = (rng.gen_range(-60.0..60.0), rng.gen_range(-180.0..180.0));
        let truth = (
            lat + rng.gen_range(-0.0017..0.0017),
            lon + rng.gen_range(-0.0017..0.0017),
        );
        let range = cluster_oracle::distance_m((lat, lon), truth);
        if !(1.0..=200.0).contains(&range) {
            continue;
        }
        let o = sighting(GeoPoint::new(lat, lon).unwrap(), bearing((lat, lon), truth), range, 5.0);
        let est = localize::localize(&o, &cfg).map_err(|e| e.to_string())?;
        worst = worst.max(cluster_oracle::distance_m((est.position.lat, est.position.lon), truth));
        n += 1;
    }
    check(worst < 0.01, || format!("worst round trip {worst} m"))?;
    let est = localize::localize(&sighting(GeoPoint::new(48.0, 11.0).unwrap(), 30.0, 60.0, 5.0), &cfg)
        .map_err(|e| e.to_string())?;
    let rel = (est.position_sigma_m - 5.0) / 5.0;
    check((0.0..=0.03).contains(&rel), || {
        format!("position_sigma {} m", est.position_sigma_m)
    })?;
    Ok(format!(
        "{n} sightings <= 200 m, worst {:.2e} m < 0.01 m; sigma {:.4} m (+{:.2}% over GPS)",
        worst,
        est.position_sigma_m,
        rel * 100.0
    ))
}

fn exposure_fixture() -> Outcome {
    let mut b = GraphBuilder::new();
    b.add_node("w", fixtures::offset(fixtures::origin(), -50.0, 0.0))
        .unwrap();
    b.add_node("e", fixtures::offset(fixtures::origin(), 50.0, 0.0))
        .unwrap();
    b.add_edge(EdgeSpec {
        key: "we".into(),
        from: "w".into(),
        to: "e".into(),
        ..EdgeSpec::default()
    })
    .map_err(|e| e.to_string())?;
    let g = b.build();
    let cams = [Camera::round("c", fixtures::origin()).with_range(15.0)];
    let params = ExposureParams {
        buffer: BufferPolicy::Fixed(4.0),
        ..ExposureParams::default()
    };
    let x = annotate_graph(&g, &cams, &params)
        .map_err(|e| e.to_string())?
        .get(EdgeId(0))
        .clone();
    check((x.fraction - 0.38).abs() <= 0.02, || format!("fraction {}", x.fraction))?;
    Ok(format!("fraction {:.4} (0.38 +/- 0.02)", x.fraction))
}

fn format_round_trips() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    for i in 0..100 {
        let mut registry = Registry::default();
        for k in 0..rng.gen_range(0..10) {
            let p = GeoPoint::new(rng.gen_range(-80.0..80.0), rng.gen_range(-179.0..179.0)).unwrap();
            let mut cam = if rng.gen_bool(0.5) {
                Camera::directed(format!("c{k}"), p, rng.gen_range(0.0..360.0))
            } else {
                Camera::round(format!("c{k}"), p)
            };
            cam.range_m = rng.gen_range(1.0..100.0);
            cam.confidence = rng.gen_range(0.0..=1.0);
            let mut entry = RegistryEntry::from(cam);
            entry.extra.insert("tag".into(), serde_json::json!([k, "x"]));
            registry.push(entry).map_err(|e| e.to_string())?;
        }
        let again = Registry::parse(&registry.to_string_pretty()).map_err(|e| e.to_string())?;
        check(again == registry, || format!("registry {i} changed after round trip"))?;
    }
    for i in 0..50 {
        let net = fixtures::random_network(&mut rng, 12);
        let again = graph_json::parse(&graph_json::to_string(&net.graph)).map_err(|e| e.to_string())?;
        check(
            again.nodes() == net.graph.nodes() && again.edges() == net.graph.edges(),
            || format!("graph {i} changed after round trip"),
        )?;
    }
    let from_osm = osm::parse(include_str!("fixtures/small_town.osm")).map_err(|e| e.to_string())?;
    let twin = graph_json::parse(include_str!("fixtures/small_town.graph.json")).map_err(|e| e.to_string())?;
    check(
        from_osm.nodes() == twin.nodes() && from_osm.edges() == twin.edges(),
        || "OSM fixture differs from its native twin".into(),
    )?;
    Ok(format!(
        "100 registries, 50 graphs lossless; OSM fixture = twin ({} nodes, {} edges)",
        twin.nodes().len(),
        twin.edges().len()
    ))
}

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion {
            name: "F1 identities",
            budget: secs(1),
            run: f1_identities,
        },
        Criterion {
            name: "Fusion reproduction",
            budget: secs(1),
            run: fusion_reproduction,
        },
        Criterion {
            name: "Metrics oracle",
            budget: secs(30),
            run: metrics_oracle,
        },
        Criterion {
            name: "Size buckets",
            budget: None,
            run: size_buckets,
        },
        Criterion {
            name: "Router optimality oracle",
            budget: secs(60),
            run: router_oracle,
        },
        Criterion {
            name: "Privacy avoidance",
            budget: secs(1),
            run: privacy_avoidance,
        },
        Criterion {
            name: "Mode degeneracy",
            budget: None,
            run: mode_degeneracy,
        },
        Criterion {
            name: "Localizer",
            budget: None,
            run: localizer,
        },
        Criterion {
            name: "Exposure analytic fixture",
            budget: None,
            run: exposure_fixture,
        },
        Criterion {
            name: "Format round trips",
            budget: None,
            run: format_round_trips,
        },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(msg)
        });
        let elapsed = start.elapsed();
        let timing = match c.budget {
            Some(b) => format!("{:.3} s, budget {} s", elapsed.as_secs_f64(), b.as_secs()),
            None => format!("{:.3} s", elapsed.as_secs_f64()),
        };
        let result = match (result, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => Err("over time budget".to_string()),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS  {}: {detail} [{timing}]", c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}: {why} [{timing}]", c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
