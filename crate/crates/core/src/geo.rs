//! Spherical-earth geodesy and a local equirectangular projection.
//!
//! Angles cross the public API in degrees; bearings are clockwise from true
//! north. The local projection is only trusted within
//! [`MAX_PROJECTION_M`] of its origin, which comfortably covers camera
//! ranges, street widths and collector sighting distances.

use core::fmt;

use crate::math;

/// Mean earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Largest distance from the origin the local projection accepts.
pub const MAX_PROJECTION_M: f64 = 5_000.0;

/// Tolerance used when comparing coordinates.
pub const GEO_EPSILON_DEG: f64 = 1e-9;

const DEG: f64 = core::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeoError {
    InvalidCoordinate { lat: f64, lon: f64 },
    OutOfProjectionRange { distance_m: f64 },
    DegenerateInput,
}

impl fmt::Display for GeoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeoError::InvalidCoordinate { lat, lon } => {
                write!(f, "coordinate out of range: lat {lat}, lon {lon}")
            }
            GeoError::OutOfProjectionRange { distance_m } => write!(
                f,
                "point {distance_m:.1} m from origin exceeds the {MAX_PROJECTION_M} m projection range"
            ),
            GeoError::DegenerateInput => f.write_str("bearing between coincident points is undefined"),
        }
    }
}

impl core::error::Error for GeoError {}

/// WGS84-style latitude/longitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, GeoError> {
        let p = GeoPoint { lat, lon };
        if p.is_valid() {
            Ok(p)
        } else {
            Err(GeoError::InvalidCoordinate { lat, lon })
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }

    /// Equality within [`GEO_EPSILON_DEG`] on both axes.
    pub fn approx_eq(&self, other: &GeoPoint) -> bool {
        (self.lat - other.lat).abs() <= GEO_EPSILON_DEG && wrap_lon_delta(self.lon - other.lon).abs() <= GEO_EPSILON_DEG
    }
}

/// Planar offset in meters from a declared origin (x east, y north).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalXY {
    pub x: f64,
    pub y: f64,
}

impl LocalXY {
    pub fn new(x: f64, y: f64) -> Self {
        LocalXY { x, y }
    }

    pub fn norm(&self) -> f64 {
        math::hypot(self.x, self.y)
    }

    pub fn distance(&self, other: &LocalXY) -> f64 {
        math::hypot(self.x - other.x, self.y - other.y)
    }
}

fn wrap_lon_delta(d: f64) -> f64 {
    math::rem_euclid(d + 180.0, 360.0) - 180.0
}

/// Wraps any angle into `[0, 360)`.
pub fn normalize_bearing(deg: f64) -> f64 {
    math::rem_euclid(deg, 360.0)
}

/// Signed smallest difference `a - b` in `(-180, 180]`.
pub fn angle_diff_deg(a: f64, b: f64) -> f64 {
    let d = math::rem_euclid(a - b, 360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

/// Great-circle distance in meters.
pub fn haversine_m(a: GeoPoint, b: GeoPoint) -> f64 {
    let dlat = (b.lat - a.lat) * DEG;
    let dlon = (b.lon - a.lon) * DEG;
    let s_lat = math::sin(dlat / 2.0);
    let s_lon = math::sin(dlon / 2.0);
    let h = s_lat * s_lat + math::cos(a.lat * DEG) * math::cos(b.lat * DEG) * s_lon * s_lon;
    2.0 * EARTH_RADIUS_M * math::asin(math::sqrt(h.clamp(0.0, 1.0)))
}

// Projection without the range check. Used for bucketing where only a
// monotone planar embedding is needed.
pub(crate) fn project_unchecked(origin: GeoPoint, p: GeoPoint) -> LocalXY {
    let dlon = wrap_lon_delta(p.lon - origin.lon);
    LocalXY {
        x: EARTH_RADIUS_M * dlon * math::cos(origin.lat * DEG) * DEG,
        y: EARTH_RADIUS_M * (p.lat - origin.lat) * DEG,
    }
}

pub(crate) fn unproject_unchecked(origin: GeoPoint, xy: LocalXY) -> GeoPoint {
    let lat = origin.lat + xy.y / (EARTH_RADIUS_M * DEG);
    let c = math::cos(origin.lat * DEG);
    let lon = if xy.x == 0.0 {
        origin.lon
    } else {
        origin.lon + xy.x / (EARTH_RADIUS_M * c * DEG)
    };
    GeoPoint {
        lat,
        lon: wrap_lon_delta(lon),
    }
}

/// Equirectangular projection of `p` around `origin`.
pub fn project_local(origin: GeoPoint, p: GeoPoint) -> Result<LocalXY, GeoError> {
    let d = haversine_m(origin, p);
    if d >= MAX_PROJECTION_M {
        return Err(GeoError::OutOfProjectionRange { distance_m: d });
    }
    Ok(project_unchecked(origin, p))
}

/// Inverse of [`project_local`].
pub fn unproject_local(origin: GeoPoint, xy: LocalXY) -> Result<GeoPoint, GeoError> {
    let d = xy.norm();
    if !d.is_finite() || d >= MAX_PROJECTION_M {
        return Err(GeoError::OutOfProjectionRange { distance_m: d });
    }
    if xy.x != 0.0 && math::cos(origin.lat * DEG).abs() < 1e-12 {
        return Err(GeoError::DegenerateInput);
    }
    let p = unproject_unchecked(origin, xy);
    if !p.is_valid() {
        return Err(GeoError::OutOfProjectionRange { distance_m: d });
    }
    Ok(p)
}

/// Point reached from `origin` after `distance_m` along `bearing_deg`.
pub fn destination_point(origin: GeoPoint, bearing_deg: f64, distance_m: f64) -> Result<GeoPoint, GeoError> {
    if distance_m.is_nan() || distance_m < 0.0 || !bearing_deg.is_finite() {
        return Err(GeoError::DegenerateInput);
    }
    if distance_m == 0.0 {
        return Ok(origin);
    }
    let b = bearing_deg * DEG;
    unproject_local(
        origin,
        LocalXY {
            x: distance_m * math::sin(b),
            y: distance_m * math::cos(b),
        },
    )
}

/// Initial bearing from `a` towards `b` in `[0, 360)`.
///
/// Within the projection range this is the exact inverse of
/// [`destination_point`]; beyond it the great-circle initial bearing is
/// returned.
pub fn initial_bearing_deg(a: GeoPoint, b: GeoPoint) -> Result<f64, GeoError> {
    if a.approx_eq(&b) {
        return Err(GeoError::DegenerateInput);
    }
    let bearing = match project_local(a, b) {
        Ok(xy) => math::atan2(xy.x, xy.y) / DEG,
        Err(_) => {
            let (p1, p2) = (a.lat * DEG, b.lat * DEG);
            let dl = (b.lon - a.lon) * DEG;
            let y = math::sin(dl) * math::cos(p2);
            let x = math::cos(p1) * math::sin(p2) - math::sin(p1) * math::cos(p2) * math::cos(dl);
            math::atan2(y, x) / DEG
        }
    };
    Ok(normalize_bearing(bearing))
}

/// Sum of haversine lengths along a polyline.
pub fn polyline_length_m(points: &[GeoPoint]) -> f64 {
    points.windows(2).map(|w| haversine_m(w[0], w[1])).sum()
}
