use cctv_core::camera::{self, CoverageZone, ZoneShape};
use cctv_core::geo::{self, LocalXY};
use cctv_testkit::{fixtures, raster_oracle};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn agreement(radius: f64, heading: f64, fov: f64, buffer: f64) -> f64 {
    let center = fixtures::origin();
    let zone = CoverageZone {
        camera_id: "s".into(),
        center,
        shape: ZoneShape::Sector {
            radius_m: radius,
            heading_deg: heading,
            fov_deg: fov,
        },
    };
    let poly = raster_oracle::sector_polygon(radius, heading, fov, 0.25);
    let cells = raster_oracle::grid(radius + buffer + 2.0, 0.5);
    let same = cells
        .iter()
        .filter(|&&(x, y)| {
            let p = geo::unproject_local(center, LocalXY::new(x, y)).unwrap();
            camera::covers(&zone, p, buffer) == raster_oracle::in_buffered(&poly, (x, y), buffer)
        })
        .count();
    same as f64 / cells.len() as f64
}

#[test]
fn reference_sector_with_street_buffer() {
    let a = agreement(30.0, 0.0, 90.0, 2.0);
    assert!(a >= 0.995, "{a}");
}

/// Street-scale buffers (half of a 2..16 m street) on realistic ranges.
#[test]
fn buffered_sector_matches_raster() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..12 {
        let radius = rng.gen_range(20.0..60.0);
        let heading = rng.gen_range(0.0..360.0);
        let fov = rng.gen_range(20.0..180.0);
        let buffer = rng.gen_range(1.0..8.0) / 2.0;
        let a = agreement(radius, heading, fov, buffer);
        assert!(a >= 0.995, "r={radius} h={heading} fov={fov} b={buffer}: {a}");
    }
}

#[test]
fn unbuffered_sector_matches_raster() {
    for (heading, fov) in [(0.0, 90.0), (45.0, 60.0), (350.0, 120.0), (180.0, 180.0)] {
        let a = agreement(30.0, heading, fov, 0.0);
        assert!(a >= 0.995, "{heading}/{fov}: {a}");
    }
}
