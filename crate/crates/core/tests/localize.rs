use cctv_core::camera::{CameraKind, CameraSource};
use cctv_core::localize::{self, CameraEstimate, LocalizerConfig, Observation};
use cctv_core::GeoPoint;
use cctv_testkit::cluster_oracle;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Great-circle initial bearing, degrees clockwise from north.
fn bearing(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (p1, p2) = (a.0.to_radians(), b.0.to_radians());
    let dl = (b.1 - a.1).to_radians();
    let y = dl.sin() * p2.cos();
    let x = p1.cos() * p2.sin() - p1.sin() * p2.cos() * dl.cos();
    y.atan2(x).to_degrees().rem_euclid(360.0)
}

fn observation(observer: GeoPoint, heading: f64, range: f64, gps: f64) -> Observation {
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

#[test]
fn sighting_round_trip_under_a_centimetre() {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let lat = rng.gen_range(-60.0..60.0);
        let lon = rng.gen_range(-180.0..180.0);
        let observer = GeoPoint::new(lat, lon).unwrap();
        let truth = (
            lat + rng.gen_range(-0.0017..0.0017),
            lon + rng.gen_range(-0.0017..0.0017),
        );
        let range = cluster_oracle::distance_m((lat, lon), truth);
        if !(1.0..=200.0).contains(&range) {
            continue;
        }
        let heading = bearing((lat, lon), truth);
        let est = localize::localize(
            &observation(observer, heading % 360.0, range, 5.0),
            &LocalizerConfig::default(),
        )
        .unwrap();
        let err = cluster_oracle::distance_m((est.position.lat, est.position.lon), truth);
        worst = worst.max(err);
    }
    assert!(worst < 0.01, "worst round-trip error {worst} m");
}

#[test]
fn position_sigma_dominated_by_gps() {
    let o = observation(GeoPoint::new(48.0, 11.0).unwrap(), 30.0, 60.0, 5.0);
    let est = localize::localize(&o, &LocalizerConfig::default()).unwrap();
    let rel = (est.position_sigma_m - 5.0) / 5.0;
    assert!((0.0..=0.03).contains(&rel), "{}", est.position_sigma_m);
}

fn estimate(lat: f64, lon: f64, kind: CameraKind, facing: f64) -> CameraEstimate {
    CameraEstimate {
        position: GeoPoint::new(lat, lon).unwrap(),
        position_sigma_m: 3.0,
        kind,
        score: 0.5,
        provenance: vec![],
        facing_deg: facing,
    }
}

#[test]
fn partition_matches_naive_single_linkage() {
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..200 {
        let n = rng.gen_range(0..25);
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| (47.0 + rng.gen_range(0.0..0.0006), 8.0 + rng.gen_range(0.0..0.0009)))
            .collect();
        let est: Vec<CameraEstimate> = pts
            .iter()
            .map(|&(a, b)| estimate(a, b, CameraKind::Round, 0.0))
            .collect();
        for eps in [2.0, 8.0, 15.0] {
            assert_eq!(
                localize::cluster_partition(&est, eps),
                cluster_oracle::single_linkage(&pts, eps)
            );
        }
    }
}

#[test]
fn clustered_cameras_carry_votes_and_heading() {
    let est = vec![
        estimate(47.0, 8.0, CameraKind::Directed, 350.0),
        estimate(47.00001, 8.0, CameraKind::Directed, 10.0),
        estimate(47.00002, 8.0, CameraKind::Round, 0.0),
        estimate(47.01, 8.0, CameraKind::Round, 0.0),
    ];
    let cams = localize::cluster(&est, 8.0);
    assert_eq!(cams.len(), 2);
    assert_eq!(cams[0].kind, CameraKind::Directed);
    let h = cams[0].heading_deg.unwrap();
    assert!(!(1e-6..=360.0 - 1e-6).contains(&h), "{h}");
    assert_eq!(cams[1].kind, CameraKind::Round);
    assert!(cams
        .iter()
        .all(|c| c.source == CameraSource::Localized && c.validate().is_ok()));
    let d = cluster_oracle::distance_m((cams[0].position.lat, cams[0].position.lon), (47.00001, 8.0));
    assert!(d < 0.01, "{d}");
}
