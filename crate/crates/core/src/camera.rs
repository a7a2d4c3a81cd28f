//! Cameras and their ground-plane coverage footprints.
//!
//! Two camera classes are modeled. Round (dome/sphere) cameras see a full
//! disc around the mount; directed (box/bullet) cameras see a circular
//! sector centered on their heading. Pan-tilt-zoom units are treated as
//! static. Coverage ignores mount height, tilt and occlusion.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::geo::{self, GeoPoint, LocalXY};
use crate::math;

pub const DEFAULT_DIRECTED_FOV_DEG: f64 = 90.0;
pub const DEFAULT_DIRECTED_RANGE_M: f64 = 30.0;
pub const DEFAULT_ROUND_RANGE_M: f64 = 15.0;
pub const MAX_RANGE_M: f64 = 200.0;
pub const MAX_DIRECTED_FOV_DEG: f64 = 180.0;

const DEG: f64 = core::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CameraKind {
    Directed,
    Round,
}

impl CameraKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CameraKind::Directed => "directed",
            CameraKind::Round => "round",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "directed" => Some(CameraKind::Directed),
            "round" => Some(CameraKind::Round),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CameraSource {
    Registry,
    Localized,
    Imported,
}

impl CameraSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            CameraSource::Registry => "registry",
            CameraSource::Localized => "localized",
            CameraSource::Imported => "imported",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "registry" => Some(CameraSource::Registry),
            "localized" => Some(CameraSource::Localized),
            "imported" => Some(CameraSource::Imported),
            _ => None,
        }
    }
}

/// A camera invariant violation, naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct InvalidCamera {
    pub field: &'static str,
    pub reason: &'static str,
}

impl fmt::Display for InvalidCamera {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid camera field `{}`: {}", self.field, self.reason)
    }
}

impl core::error::Error for InvalidCamera {}

fn invalid(field: &'static str, reason: &'static str) -> InvalidCamera {
    InvalidCamera { field, reason }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    pub id: String,
    pub position: GeoPoint,
    pub kind: CameraKind,
    /// Required for directed cameras, absent for round ones.
    pub heading_deg: Option<f64>,
    /// Directed only; [`DEFAULT_DIRECTED_FOV_DEG`] when absent.
    pub fov_deg: Option<f64>,
    pub range_m: f64,
    pub source: CameraSource,
    pub confidence: f64,
}

impl Camera {
    pub fn round(id: impl Into<String>, position: GeoPoint) -> Self {
        Camera {
            id: id.into(),
            position,
            kind: CameraKind::Round,
            heading_deg: None,
            fov_deg: None,
            range_m: DEFAULT_ROUND_RANGE_M,
            source: CameraSource::Registry,
            confidence: 1.0,
        }
    }

    pub fn directed(id: impl Into<String>, position: GeoPoint, heading_deg: f64) -> Self {
        Camera {
            id: id.into(),
            position,
            kind: CameraKind::Directed,
            heading_deg: Some(heading_deg),
            fov_deg: Some(DEFAULT_DIRECTED_FOV_DEG),
            range_m: DEFAULT_DIRECTED_RANGE_M,
            source: CameraSource::Registry,
            confidence: 1.0,
        }
    }

    pub fn with_range(mut self, range_m: f64) -> Self {
        self.range_m = range_m;
        self
    }

    pub fn with_fov(mut self, fov_deg: f64) -> Self {
        self.fov_deg = Some(fov_deg);
        self
    }

    pub fn with_source(mut self, source: CameraSource) -> Self {
        self.source = source;
        self
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    pub fn validate(&self) -> Result<(), InvalidCamera> {
        if !self.position.is_valid() {
            return Err(invalid("position", "latitude/longitude out of range"));
        }
        if !(self.range_m > 0.0 && self.range_m <= MAX_RANGE_M) {
            return Err(invalid("range_m", "must be in (0, 200]"));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(invalid("confidence", "must be in [0, 1]"));
        }
        match self.kind {
            CameraKind::Directed => {
                let heading = self
                    .heading_deg
                    .ok_or_else(|| invalid("heading_deg", "required for directed cameras"))?;
                if !(heading.is_finite() && (0.0..360.0).contains(&heading)) {
                    return Err(invalid("heading_deg", "must be in [0, 360)"));
                }
                if let Some(fov) = self.fov_deg {
                    if !(fov > 0.0 && fov <= MAX_DIRECTED_FOV_DEG) {
                        return Err(invalid("fov_deg", "must be in (0, 180] for directed cameras"));
                    }
                }
            }
            CameraKind::Round => {
                if self.heading_deg.is_some() {
                    return Err(invalid("heading_deg", "not allowed for round cameras"));
                }
                if self.fov_deg.is_some() {
                    return Err(invalid("fov_deg", "not allowed for round cameras"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZoneShape {
    Disc {
        radius_m: f64,
    },
    Sector {
        radius_m: f64,
        heading_deg: f64,
        fov_deg: f64,
    },
}

impl ZoneShape {
    pub fn radius_m(&self) -> f64 {
        match *self {
            ZoneShape::Disc { radius_m } | ZoneShape::Sector { radius_m, .. } => radius_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageZone {
    pub camera_id: String,
    pub center: GeoPoint,
    pub shape: ZoneShape,
}

/// Ground footprint of a camera: a disc for round cameras, a sector for
/// directed ones. The radius always equals the camera range.
pub fn coverage_zone(camera: &Camera) -> Result<CoverageZone, InvalidCamera> {
    camera.validate()?;
    let shape = match camera.kind {
        CameraKind::Round => ZoneShape::Disc {
            radius_m: camera.range_m,
        },
        CameraKind::Directed => ZoneShape::Sector {
            radius_m: camera.range_m,
            // validate() guarantees presence
            heading_deg: camera.heading_deg.unwrap_or_default(),
            fov_deg: camera.fov_deg.unwrap_or(DEFAULT_DIRECTED_FOV_DEG),
        },
    };
    Ok(CoverageZone {
        camera_id: camera.id.clone(),
        center: camera.position,
        shape,
    })
}

/// Point-in-zone test with a lateral buffer.
///
/// The buffer grows the radius and, for sectors, widens the half-angle by
/// `asin(buffer / dist)` (the points within `buffer` of the sector's
/// straight edges). Near the two arc ends this slightly overshoots the true
/// buffered sector. Points within `buffer` of the apex are always covered.
pub fn covers(zone: &CoverageZone, p: GeoPoint, lateral_buffer_m: f64) -> bool {
    let buffer = lateral_buffer_m.max(0.0);
    let Ok(xy) = geo::project_local(zone.center, p) else {
        return false;
    };
    covers_local(&zone.shape, xy, buffer)
}

pub(crate) fn covers_local(shape: &ZoneShape, xy: LocalXY, buffer: f64) -> bool {
    let dist = xy.norm();
    match *shape {
        ZoneShape::Disc { radius_m } => dist <= radius_m + buffer,
        ZoneShape::Sector {
            radius_m,
            heading_deg,
            fov_deg,
        } => {
            if dist > radius_m + buffer {
                return false;
            }
            if dist <= buffer {
                return true;
            }
            let bearing = math::atan2(xy.x, xy.y) / DEG;
            let deviation = geo::angle_diff_deg(bearing, heading_deg).abs();
            let widen = math::asin((buffer / dist.max(buffer)).min(1.0)) / DEG;
            deviation <= fov_deg / 2.0 + widen
        }
    }
}

const DEFAULT_ARC_STEP_DEG: f64 = 10.0;
const MAX_ARC_STEP_DEG: f64 = 120.0;

/// Closed ring (first vertex repeated last) approximating the zone.
///
/// A disc yields `ceil(360/step)` arc vertices; a sector yields the apex
/// followed by `ceil(fov/step) + 1` arc vertices spanning the full field of
/// view. A step that is not positive falls back to 10 degrees and steps
/// above 120 degrees are clamped.
pub fn zone_polygon(zone: &CoverageZone, arc_step_deg: f64) -> Vec<GeoPoint> {
    let step = if arc_step_deg.is_finite() && arc_step_deg > 0.0 {
        arc_step_deg.min(MAX_ARC_STEP_DEG)
    } else {
        DEFAULT_ARC_STEP_DEG
    };
    let at = |bearing_deg: f64, r: f64| {
        let b = bearing_deg * DEG;
        geo::unproject_unchecked(
            zone.center,
            LocalXY {
                x: r * math::sin(b),
                y: r * math::cos(b),
            },
        )
    };
    let mut ring = Vec::new();
    match zone.shape {
        ZoneShape::Disc { radius_m } => {
            let n = math::ceil(360.0 / step) as usize;
            for i in 0..n {
                ring.push(at(i as f64 * 360.0 / n as f64, radius_m));
            }
        }
        ZoneShape::Sector {
            radius_m,
            heading_deg,
            fov_deg,
        } => {
            let n = (math::ceil(fov_deg / step) as usize).max(1);
            let start = heading_deg - fov_deg / 2.0;
            ring.push(zone.center);
            for i in 0..=n {
                ring.push(at(start + i as f64 * fov_deg / n as f64, radius_m));
            }
        }
    }
    if let Some(first) = ring.first().copied() {
        ring.push(first);
    }
    ring
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> GeoPoint {
        GeoPoint::new(48.0, 11.0).unwrap()
    }

    fn at(bearing: f64, dist: f64) -> GeoPoint {
        geo::destination_point(origin(), bearing, dist).unwrap()
    }

    fn sector(radius_m: f64, heading_deg: f64, fov_deg: f64) -> CoverageZone {
        CoverageZone {
            camera_id: "s".into(),
            center: origin(),
            shape: ZoneShape::Sector {
                radius_m,
                heading_deg,
                fov_deg,
            },
        }
    }

    #[test]
    fn zone_from_camera() {
        let round = Camera::round("r", origin());
        let z = coverage_zone(&round).unwrap();
        assert_eq!(z.shape, ZoneShape::Disc { radius_m: 15.0 });

        let directed = Camera::directed("d", origin(), 90.0).with_range(30.0);
        let z = coverage_zone(&directed).unwrap();
        assert_eq!(
            z.shape,
            ZoneShape::Sector {
                radius_m: 30.0,
                heading_deg: 90.0,
                fov_deg: 90.0
            }
        );
        assert_eq!(z.camera_id, "d");
    }

    #[test]
    fn invalid_cameras() {
        let mut c = Camera::directed("d", origin(), 90.0);
        c.heading_deg = None;
        assert_eq!(coverage_zone(&c).unwrap_err().field, "heading_deg");

        let c = Camera::directed("d", origin(), 10.0).with_fov(200.0);
        assert_eq!(c.validate().unwrap_err().field, "fov_deg");

        let c = Camera::round("r", origin()).with_range(0.0);
        assert_eq!(c.validate().unwrap_err().field, "range_m");
        let c = Camera::round("r", origin()).with_range(250.0);
        assert_eq!(c.validate().unwrap_err().field, "range_m");

        let mut c = Camera::round("r", origin());
        c.heading_deg = Some(3.0);
        assert_eq!(c.validate().unwrap_err().field, "heading_deg");

        let c = Camera::round("r", origin()).with_confidence(1.5);
        assert_eq!(c.validate().unwrap_err().field, "confidence");
    }

    #[test]
    fn disc_and_sector_membership() {
        let disc = CoverageZone {
            camera_id: "r".into(),
            center: origin(),
            shape: ZoneShape::Disc { radius_m: 15.0 },
        };
        assert!(covers(&disc, at(200.0, 10.0), 0.0));
        assert!(!covers(&disc, at(200.0, 16.0), 0.0));
        assert!(covers(&disc, at(200.0, 16.0), 2.0));

        let s = sector(30.0, 0.0, 90.0);
        assert!(!covers(&s, at(90.0, 20.0), 0.0));
        assert!(covers(&s, at(30.0, 20.0), 0.0));
        assert!(!covers(&s, at(0.0, 31.0), 0.0));
        // apex neighbourhood
        assert!(covers(&s, at(180.0, 1.5), 2.0));
        assert!(!covers(&s, at(180.0, 2.5), 2.0));
    }

    #[test]
    fn buffer_widens_sector_by_edge_distance() {
        let s = sector(30.0, 0.0, 90.0);
        // 20 m out at bearing 50deg: 5deg past the edge, perpendicular gap 20*sin(5deg)=1.74 m
        let p = at(50.0, 20.0);
        assert!(!covers(&s, p, 1.7));
        assert!(covers(&s, p, 1.8));
    }

    #[test]
    fn full_circle_sector_matches_disc() {
        let s = sector(20.0, 37.0, 360.0);
        let d = CoverageZone {
            camera_id: "d".into(),
            center: origin(),
            shape: ZoneShape::Disc { radius_m: 20.0 },
        };
        for i in 0..72 {
            for dist in [0.5, 5.0, 19.9, 20.1, 23.0] {
                let p = at(i as f64 * 5.0, dist);
                for b in [0.0, 2.0] {
                    assert_eq!(covers(&s, p, b), covers(&d, p, b));
                }
            }
        }
    }

    #[test]
    fn polygon_vertex_counts() {
        let disc = CoverageZone {
            camera_id: "r".into(),
            center: origin(),
            shape: ZoneShape::Disc { radius_m: 10.0 },
        };
        let ring = zone_polygon(&disc, 90.0);
        assert_eq!(ring.len(), 5);
        assert_eq!(ring.first(), ring.last());

        let s = sector(30.0, 45.0, 90.0);
        let ring = zone_polygon(&s, 10.0);
        // apex + 10 arc vertices + closing apex
        assert_eq!(ring.len(), 12);
        assert_eq!(ring[0], origin());
        assert_eq!(ring.first(), ring.last());
    }

    #[test]
    fn polygon_vertices_lie_in_zone() {
        let zones = [
            sector(30.0, 300.0, 90.0),
            sector(12.0, 10.0, 170.0),
            CoverageZone {
                camera_id: "r".into(),
                center: origin(),
                shape: ZoneShape::Disc { radius_m: 15.0 },
            },
        ];
        for z in &zones {
            for v in zone_polygon(z, 7.0) {
                assert!(covers(z, v, 0.01), "{v:?}");
            }
        }
    }

    #[test]
    fn bad_arc_step_falls_back() {
        let disc = CoverageZone {
            camera_id: "r".into(),
            center: origin(),
            shape: ZoneShape::Disc { radius_m: 10.0 },
        };
        assert_eq!(zone_polygon(&disc, 0.0).len(), 37);
        assert_eq!(zone_polygon(&disc, f64::NAN).len(), 37);
        assert_eq!(zone_polygon(&disc, 400.0).len(), 4);
    }
}
