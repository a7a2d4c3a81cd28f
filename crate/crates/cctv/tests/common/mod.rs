#![allow(dead_code)]

use std::path::PathBuf;

use cctv::formats::graph_json;
use cctv::formats::registry::{Registry, RegistryEntry};
use cctv::AppConfig;
use cctv_testkit::fixtures::{self, grid_point};
use serde_json::json;
use tempfile::TempDir;

/// Temporary data directory holding the 5×5 grid (plus a detached two-node
/// island 2 km east) and a registry with the two corridor cameras.
pub struct Workspace {
    pub dir: TempDir,
    pub registry: PathBuf,
    pub graph: PathBuf,
}

pub fn workspace() -> Workspace {
    let dir = tempfile::tempdir().unwrap();
    let registry = dir.path().join("registry.geojson");
    let graph = dir.path().join("graph.json");

    let mut doc: serde_json::Value = serde_json::from_str(&graph_json::to_string(&fixtures::grid(5))).unwrap();
    for (id, col) in [("island-a", 20.0), ("island-b", 21.0)] {
        let p = grid_point(0.0, col);
        doc["nodes"]
            .as_array_mut()
            .unwrap()
            .push(json!({"id": id, "lat": p.lat, "lon": p.lon}));
    }
    doc["edges"]
        .as_array_mut()
        .unwrap()
        .push(json!({"id": "island", "from": "island-a", "to": "island-b"}));
    std::fs::write(&graph, serde_json::to_string(&doc).unwrap()).unwrap();

    let mut reg = Registry::default();
    for c in fixtures::corridor_cameras() {
        reg.push(RegistryEntry::from(c)).unwrap();
    }
    std::fs::write(&registry, reg.to_string_pretty()).unwrap();
    Workspace { dir, registry, graph }
}

impl Workspace {
    pub fn config(&self) -> AppConfig {
        AppConfig {
            registry_path: self.registry.clone(),
            graph_path: self.graph.clone(),
            ..AppConfig::default()
        }
    }
}

/// `lat,lon` of grid position (row, col).
pub fn at(row: f64, col: f64) -> String {
    let p = grid_point(row, col);
    format!("{},{}", p.lat, p.lon)
}
