//! Camera localization from mobile-collector sightings.
//!
//! A sighting pairs the collector's GPS fix with the bearing and laser range
//! to a detected camera. Each sighting becomes a [`CameraEstimate`];
//! repeated sightings of the same camera are merged by single-linkage
//! clustering, and estimates can be checked against an existing registry.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::camera::{Camera, CameraKind, CameraSource, MAX_RANGE_M};
use crate::geo::{self, GeoError, GeoPoint, LocalXY};
use crate::math;

pub const DEFAULT_HEADING_SIGMA_DEG: f64 = 1.0;
pub const DEFAULT_CLUSTER_EPS_M: f64 = 8.0;
pub const DEFAULT_VALIDATE_RADIUS_M: f64 = 15.0;

// Floor for sigma-based weights so exact fixes don't divide by zero.
const MIN_SIGMA_M: f64 = 1e-3;
const DEG: f64 = core::f64::consts::PI / 180.0;

#[derive(Debug, Clone, PartialEq)]
pub enum LocalizeError {
    InvalidObservation { field: &'static str, reason: &'static str },
    Geo(GeoError),
}

impl fmt::Display for LocalizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalizeError::InvalidObservation { field, reason } => {
                write!(f, "invalid observation field `{field}`: {reason}")
            }
            LocalizeError::Geo(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for LocalizeError {}

impl From<GeoError> for LocalizeError {
    fn from(e: GeoError) -> Self {
        LocalizeError::Geo(e)
    }
}

/// One sighting of a camera by the collector.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub observer: GeoPoint,
    pub gps_sigma_m: f64,
    /// Device bearing to the target once the pan-tilt head has centered it.
    pub heading_deg: f64,
    pub range_m: f64,
    pub range_sigma_m: f64,
    pub kind: CameraKind,
    pub score: f64,
    pub timestamp: f64,
    pub image_ref: String,
}

impl Observation {
    pub fn validate(&self) -> Result<(), LocalizeError> {
        let bad = |field, reason| Err(LocalizeError::InvalidObservation { field, reason });
        if !self.observer.is_valid() {
            return bad("observer", "latitude/longitude out of range");
        }
        if !(self.range_m > 0.0 && self.range_m <= MAX_RANGE_M) {
            return bad("range_m", "must be in (0, 200]");
        }
        if !(self.gps_sigma_m >= 0.0 && self.gps_sigma_m.is_finite()) {
            return bad("gps_sigma_m", "must be a finite value >= 0");
        }
        if !(self.range_sigma_m >= 0.0 && self.range_sigma_m.is_finite()) {
            return bad("range_sigma_m", "must be a finite value >= 0");
        }
        if !(self.heading_deg.is_finite() && (0.0..360.0).contains(&self.heading_deg)) {
            return bad("heading_deg", "must be in [0, 360)");
        }
        if !(0.0..=1.0).contains(&self.score) {
            return bad("score", "must be in [0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizerConfig {
    /// One-sigma pan/tilt pointing error.
    pub heading_sigma_deg: f64,
}

impl Default for LocalizerConfig {
    fn default() -> Self {
        LocalizerConfig {
            heading_sigma_deg: DEFAULT_HEADING_SIGMA_DEG,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraEstimate {
    pub position: GeoPoint,
    pub position_sigma_m: f64,
    pub kind: CameraKind,
    pub score: f64,
    /// `image_ref`s of the contributing observations.
    pub provenance: Vec<String>,
    /// Bearing from the estimated camera back to the observer.
    pub facing_deg: f64,
}

/// Places the sighted camera at the observer's GPS fix plus the measured
/// range along the measured bearing.
///
/// The position error combines GPS, range and pointing error in quadrature:
/// `sqrt(gps² + range_sigma² + (range · sin(heading_sigma))²)`.
pub fn localize(obs: &Observation, config: &LocalizerConfig) -> Result<CameraEstimate, LocalizeError> {
    obs.validate()?;
    let position = geo::destination_point(obs.observer, obs.heading_deg, obs.range_m)?;
    let lateral = obs.range_m * math::sin(config.heading_sigma_deg * DEG);
    let position_sigma_m =
        math::sqrt(obs.gps_sigma_m * obs.gps_sigma_m + obs.range_sigma_m * obs.range_sigma_m + lateral * lateral);
    Ok(CameraEstimate {
        position,
        position_sigma_m,
        kind: obs.kind,
        score: obs.score,
        provenance: alloc::vec![obs.image_ref.clone()],
        facing_deg: geo::normalize_bearing(obs.heading_deg + 180.0),
    })
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so groups are ordered by first member
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Single-linkage groups of estimates whose chained pairwise distances are
/// at most `eps_m`. Groups are ordered by their first member and members
/// are in input order.
pub fn cluster_partition(estimates: &[CameraEstimate], eps_m: f64) -> Vec<Vec<usize>> {
    let n = estimates.len();
    let mut sets = DisjointSet::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if geo::haversine_m(estimates[i].position, estimates[j].position) <= eps_m {
                sets.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = alloc::vec![usize::MAX; n];
    for i in 0..n {
        let root = sets.find(i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

/// Merges repeated sightings into cameras.
///
/// Each cluster becomes one camera at the inverse-variance weighted
/// centroid. Kind is the majority vote (ties go to directed), confidence
/// the best score. Directed cameras are assumed to face the collectors, so
/// their heading is the circular mean of the bearings back to the
/// observers.
pub fn cluster(estimates: &[CameraEstimate], eps_m: f64) -> Vec<Camera> {
    cluster_partition(estimates, eps_m)
        .into_iter()
        .enumerate()
        .map(|(k, members)| merge(estimates, &members, k))
        .collect()
}

fn merge(estimates: &[CameraEstimate], members: &[usize], index: usize) -> Camera {
    let anchor = estimates[members[0]].position;
    let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
    let (mut hx, mut hy) = (0.0, 0.0);
    let mut directed = 0usize;
    let mut confidence: f64 = 0.0;
    for &m in members {
        let e = &estimates[m];
        let xy = geo::project_unchecked(anchor, e.position);
        let s = e.position_sigma_m.max(MIN_SIGMA_M);
        let w = 1.0 / (s * s);
        sx += w * xy.x;
        sy += w * xy.y;
        sw += w;
        hx += math::sin(e.facing_deg * DEG);
        hy += math::cos(e.facing_deg * DEG);
        if e.kind == CameraKind::Directed {
            directed += 1;
        }
        confidence = confidence.max(e.score);
    }
    let position = if members.len() == 1 {
        anchor
    } else {
        geo::unproject_unchecked(anchor, LocalXY::new(sx / sw, sy / sw))
    };
    let id = format!("loc-{index}");
    let mut camera = if 2 * directed >= members.len() {
        let heading = geo::normalize_bearing(math::atan2(hx, hy) / DEG);
        Camera::directed(id, position, heading)
    } else {
        Camera::round(id, position)
    };
    camera.source = CameraSource::Localized;
    camera.confidence = confidence.clamp(0.0, 1.0);
    camera
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationStatus {
    Confirmed,
    Unconfirmed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegistryCheck {
    pub camera_id: String,
    pub status: ValidationStatus,
    /// Distance to the nearest estimate; `None` without estimates.
    pub nearest_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// One entry per registry camera, in registry order.
    pub checks: Vec<RegistryCheck>,
    /// Indices of estimates farther than the radius from every registry camera.
    pub novel: Vec<usize>,
}

impl ValidationReport {
    pub fn confirmed(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.status == ValidationStatus::Confirmed)
            .count()
    }

    pub fn unconfirmed(&self) -> usize {
        self.checks.len() - self.confirmed()
    }
}

/// Confirms registry cameras that have an estimate within `radius_m` and
/// lists estimates that match no registry camera.
pub fn validate_registry(registry: &[Camera], estimates: &[CameraEstimate], radius_m: f64) -> ValidationReport {
    let checks = registry
        .iter()
        .map(|cam| {
            let nearest_m = estimates
                .iter()
                .map(|e| geo::haversine_m(cam.position, e.position))
                .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))));
            let status = match nearest_m {
                Some(d) if d <= radius_m => ValidationStatus::Confirmed,
                _ => ValidationStatus::Unconfirmed,
            };
            RegistryCheck {
                camera_id: cam.id.clone(),
                status,
                nearest_m,
            }
        })
        .collect();
    let novel = estimates
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            registry
                .iter()
                .all(|cam| geo::haversine_m(cam.position, e.position) > radius_m)
        })
        .map(|(i, _)| i)
        .collect();
    ValidationReport { checks, novel }
}
