//! Projection of camera coverage onto graph edges.
//!
//! Each edge is sampled at evenly spaced points no further apart than the
//! sample interval, endpoints included. A sample is exposed when it lies in
//! at least one coverage zone after buffering by half the street width.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::camera::{self, Camera, CoverageZone, InvalidCamera};
use crate::graph::{Edge, EdgeId, RoadGraph};
use crate::math;

pub const DEFAULT_SAMPLE_INTERVAL_M: f64 = 1.0;
pub const MAX_SAMPLE_INTERVAL_M: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub enum ExposureError {
    InvalidSampleInterval(f64),
    InvalidCamera { camera_id: String, source: InvalidCamera },
}

impl fmt::Display for ExposureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExposureError::InvalidSampleInterval(v) => {
                write!(f, "sample interval {v} m outside (0, {MAX_SAMPLE_INTERVAL_M}]")
            }
            ExposureError::InvalidCamera { camera_id, source } => write!(f, "camera `{camera_id}`: {source}"),
        }
    }
}

impl core::error::Error for ExposureError {}

/// How far outside a zone a sample may sit and still count as covered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BufferPolicy {
    /// Half of the edge's street width.
    HalfStreetWidth,
    Fixed(f64),
}

impl BufferPolicy {
    pub fn buffer_for(&self, edge: &Edge) -> f64 {
        match *self {
            BufferPolicy::HalfStreetWidth => edge.width_m / 2.0,
            BufferPolicy::Fixed(b) => b.max(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExposureParams {
    pub sample_interval_m: f64,
    pub buffer: BufferPolicy,
}

impl Default for ExposureParams {
    fn default() -> Self {
        ExposureParams {
            sample_interval_m: DEFAULT_SAMPLE_INTERVAL_M,
            buffer: BufferPolicy::HalfStreetWidth,
        }
    }
}

impl ExposureParams {
    pub fn validate(&self) -> Result<(), ExposureError> {
        let s = self.sample_interval_m;
        if !(s > 0.0 && s <= MAX_SAMPLE_INTERVAL_M) {
            return Err(ExposureError::InvalidSampleInterval(s));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeExposure {
    pub edge: EdgeId,
    /// Share of samples inside at least one zone.
    pub fraction: f64,
    /// Cameras covering at least one sample.
    pub camera_ids: BTreeSet<String>,
    /// `fraction * length_m`.
    pub exposed_m: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExposureMap {
    pub edges: Vec<EdgeExposure>,
    pub params: ExposureParams,
}

impl ExposureMap {
    /// Map with zero exposure everywhere, e.g. for a camera-free registry.
    pub fn empty(graph: &RoadGraph, params: ExposureParams) -> Self {
        let edges = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| edge_exposure(EdgeId(i as u32), e, &[], &params))
            .collect();
        ExposureMap { edges, params }
    }

    pub fn get(&self, edge: EdgeId) -> &EdgeExposure {
        &self.edges[edge.index()]
    }
}

/// Samples one edge against the given zones.
pub fn edge_exposure(id: EdgeId, edge: &Edge, zones: &[CoverageZone], params: &ExposureParams) -> EdgeExposure {
    let buffer = params.buffer.buffer_for(edge);
    let length = edge.polyline_m();
    let intervals = (math::ceil(length / params.sample_interval_m) as usize).max(1);
    let samples = intervals + 1;
    let mut exposed = 0usize;
    let mut camera_ids = BTreeSet::new();
    for i in 0..samples {
        let p = edge.point_at(i as f64 / intervals as f64);
        let mut hit = false;
        for z in zones {
            if camera::covers(z, p, buffer) {
                hit = true;
                if !camera_ids.contains(&z.camera_id) {
                    camera_ids.insert(z.camera_id.clone());
                }
            }
        }
        if hit {
            exposed += 1;
        }
    }
    let fraction = exposed as f64 / samples as f64;
    EdgeExposure {
        edge: id,
        fraction,
        camera_ids,
        exposed_m: fraction * edge.length_m,
        samples,
    }
}

fn zones_of(cameras: &[Camera]) -> Result<Vec<CoverageZone>, ExposureError> {
    cameras
        .iter()
        .map(|c| {
            camera::coverage_zone(c).map_err(|source| ExposureError::InvalidCamera {
                camera_id: c.id.clone(),
                source,
            })
        })
        .collect()
}

/// Exposure for every edge. Each camera is only tested against edges the
/// graph's grid index places within its range plus the largest buffer.
pub fn annotate_graph(
    graph: &RoadGraph,
    cameras: &[Camera],
    params: &ExposureParams,
) -> Result<ExposureMap, ExposureError> {
    params.validate()?;
    let zones = zones_of(cameras)?;
    let max_buffer = graph
        .edges()
        .iter()
        .map(|e| params.buffer.buffer_for(e))
        .fold(0.0, f64::max);
    let mut candidates: Vec<Vec<CoverageZone>> = alloc::vec![Vec::new(); graph.edges().len()];
    for z in &zones {
        // 1 m slack on top of the geometric reach
        let margin = z.shape.radius_m() + max_buffer + 1.0;
        for e in graph.edges_near(z.center, margin) {
            candidates[e.index()].push(z.clone());
        }
    }
    let edges = graph
        .edges()
        .iter()
        .zip(&candidates)
        .enumerate()
        .map(|(i, (e, zs))| edge_exposure(EdgeId(i as u32), e, zs, params))
        .collect();
    Ok(ExposureMap { edges, params: *params })
}

/// Same result as [`annotate_graph`] but testing every camera against every
/// edge.
pub fn annotate_graph_exhaustive(
    graph: &RoadGraph,
    cameras: &[Camera],
    params: &ExposureParams,
) -> Result<ExposureMap, ExposureError> {
    params.validate()?;
    let zones = zones_of(cameras)?;
    let edges = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| edge_exposure(EdgeId(i as u32), e, &zones, params))
        .collect();
    Ok(ExposureMap { edges, params: *params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::ZoneShape;
    use crate::geo::{self, GeoPoint};
    use crate::graph::{EdgeSpec, GraphBuilder};

    fn straight_edge(length_m: f64) -> (RoadGraph, GeoPoint) {
        let a = GeoPoint::new(51.5, -0.1).unwrap();
        let b = geo::destination_point(a, 90.0, length_m).unwrap();
        let mut g = GraphBuilder::new();
        g.add_node("a", a).unwrap();
        g.add_node("b", b).unwrap();
        g.add_edge(EdgeSpec {
            key: "e".into(),
            from: "a".into(),
            to: "b".into(),
            ..EdgeSpec::default()
        })
        .unwrap();
        (g.build(), a)
    }

    #[test]
    fn no_cameras_no_exposure() {
        let (g, _) = straight_edge(100.0);
        let m = annotate_graph(&g, &[], &ExposureParams::default()).unwrap();
        assert_eq!(m.get(EdgeId(0)).fraction, 0.0);
        assert!(m.get(EdgeId(0)).camera_ids.is_empty());
        assert_eq!(m, ExposureMap::empty(&g, ExposureParams::default()));
    }

    #[test]
    fn edge_inside_disc_is_fully_exposed() {
        let (g, a) = straight_edge(10.0);
        let center = geo::destination_point(a, 90.0, 5.0).unwrap();
        let cam = Camera::round("r", center).with_range(15.0);
        let m = annotate_graph(&g, &[cam], &ExposureParams::default()).unwrap();
        let e = m.get(EdgeId(0));
        assert_eq!(e.fraction, 1.0);
        assert_eq!(e.camera_ids.iter().collect::<Vec<_>>(), ["r"]);
        assert!((e.exposed_m - g.edge(EdgeId(0)).length_m).abs() < 1e-9);
    }

    #[test]
    fn chord_through_disc() {
        // covered span 2 * (15 + 4) = 38 m of 100 m
        let (g, a) = straight_edge(100.0);
        let center = geo::destination_point(a, 90.0, 50.0).unwrap();
        let cam = Camera::round("r", center).with_range(15.0);
        let m = annotate_graph(&g, &[cam], &ExposureParams::default()).unwrap();
        let f = m.get(EdgeId(0)).fraction;
        assert!((f - 0.38).abs() <= 0.02, "{f}");
        assert_eq!(m.get(EdgeId(0)).samples, 101);
    }

    #[test]
    fn far_camera_is_pruned_and_harmless() {
        let (g, a) = straight_edge(100.0);
        let far = geo::destination_point(a, 0.0, 800.0).unwrap();
        let cam = Camera::round("far", far);
        let m = annotate_graph(&g, core::slice::from_ref(&cam), &ExposureParams::default()).unwrap();
        assert_eq!(m.get(EdgeId(0)).fraction, 0.0);
        assert_eq!(
            m,
            annotate_graph_exhaustive(&g, &[cam], &ExposureParams::default()).unwrap()
        );
    }

    #[test]
    fn rejects_bad_params_and_cameras() {
        let (g, a) = straight_edge(100.0);
        let p = ExposureParams {
            sample_interval_m: 6.0,
            ..ExposureParams::default()
        };
        assert!(matches!(
            annotate_graph(&g, &[], &p),
            Err(ExposureError::InvalidSampleInterval(_))
        ));
        let mut bad = Camera::directed("d", a, 0.0);
        bad.heading_deg = None;
        assert!(matches!(
            annotate_graph(&g, &[bad], &ExposureParams::default()),
            Err(ExposureError::InvalidCamera { .. })
        ));
    }

    #[test]
    fn sector_facing_away_misses_edge() {
        let (g, a) = straight_edge(100.0);
        let center = geo::destination_point(a, 0.0, 10.0).unwrap();
        let zone = CoverageZone {
            camera_id: "s".into(),
            center,
            shape: ZoneShape::Sector {
                radius_m: 30.0,
                heading_deg: 0.0,
                fov_deg: 60.0,
            },
        };
        let e = edge_exposure(EdgeId(0), g.edge(EdgeId(0)), &[zone], &ExposureParams::default());
        assert_eq!(e.fraction, 0.0);
    }
}
