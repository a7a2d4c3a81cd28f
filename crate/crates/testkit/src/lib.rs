//! Reference oracles and fixtures shared by the test suites.
//!
//! The oracles here are deliberately naive: exhaustive enumeration, brute
//! force and direct rasterization. They only borrow data types from
//! `cctv-core`, never its algorithms, so they stay an independent check on
//! the production code paths.

pub mod cluster_oracle;
pub mod coco_oracle;
pub mod fixtures;
pub mod raster_oracle;
pub mod route_oracle;
