//! Algorithmic core for CCTV-aware pedestrian navigation.
//!
//! Everything in this crate is pure computation over in-memory values:
//! geodetic helpers, camera coverage footprints, COCO-style detection
//! metrics with two-detector fusion, observation localization, the walkable
//! road graph with its snapping index, per-edge exposure and the
//! privacy/safety router. File formats, configuration and the service shell
//! live in the `cctv` crate.
//!
//! The crate is `no_std` and only needs an allocator.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod camera;
pub mod eval;
pub mod exposure;
pub mod geo;
pub mod graph;
pub mod localize;
pub mod router;

mod math;

pub use camera::{Camera, CameraKind, CameraSource, CoverageZone, InvalidCamera, ZoneShape};
pub use eval::{BBox, Category, Detection, EvalConfig, EvalReport, GroundTruthBox, SizeBucket};
pub use exposure::{EdgeExposure, ExposureMap, ExposureParams};
pub use geo::{GeoError, GeoPoint, LocalXY};
pub use graph::{EdgeId, GraphBuilder, GraphError, NodeId, RoadGraph};
pub use localize::{CameraEstimate, Observation, ValidationReport};
pub use router::{ExposureReport, Route, RouteError, RouteMode, RouteRequest};
