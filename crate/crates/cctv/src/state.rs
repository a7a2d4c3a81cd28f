//! Loaded registry, graph and exposure map, plus the shared service state.

use std::io::ErrorKind;
use std::path::Path;
use std::sync::{Arc, RwLock};

use cctv_core::exposure::{annotate_graph, ExposureMap, ExposureParams};
use cctv_core::graph::RoadGraph;
use cctv_core::router::{self, ExposureReport, Route, RouteRequest};
use log::info;

use crate::config::AppConfig;
use crate::error::{read_to_string, write, Error, Result};
use crate::formats::graph_json;
use crate::formats::registry::{Registry, RegistryEntry};

/// Immutable view used to answer queries.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub registry: Registry,
    pub graph: RoadGraph,
    pub exposure: ExposureMap,
}

/// Reads the registry, treating a missing file as an empty registry.
pub fn load_registry(path: &Path) -> Result<Registry> {
    match std::fs::read_to_string(path) {
        Ok(text) => Registry::parse(&text),
        Err(e) if e.kind() == ErrorKind::NotFound => Ok(Registry::default()),
        Err(e) => Err(Error::Io {
            path: path.into(),
            source: e,
        }),
    }
}

pub fn load_graph(path: &Path) -> Result<RoadGraph> {
    graph_json::parse(&read_to_string(path)?)
}

impl Snapshot {
    pub fn new(registry: Registry, graph: RoadGraph, params: &ExposureParams) -> Result<Self> {
        let exposure = annotate_graph(&graph, &registry.cameras(), params)?;
        Ok(Snapshot {
            registry,
            graph,
            exposure,
        })
    }

    pub fn load(cfg: &AppConfig) -> Result<Self> {
        let registry = load_registry(&cfg.registry_path)?;
        let graph = load_graph(&cfg.graph_path)?;
        info!(
            "loaded {} and {} nodes / {} edges",
            registry.summary(),
            graph.nodes().len(),
            graph.edges().len()
        );
        Self::new(registry, graph, &cfg.exposure_params())
    }

    pub fn route(&self, req: &RouteRequest) -> Result<(Route, ExposureReport)> {
        Ok(router::route(&self.graph, &self.exposure, req)?)
    }
}

/// Service state: readers take the current snapshot, writers are
/// serialized and publish a new snapshot when done.
pub struct AppState {
    pub config: AppConfig,
    current: RwLock<Arc<Snapshot>>,
    writer: tokio::sync::Mutex<()>,
}

impl AppState {
    pub fn new(config: AppConfig, snapshot: Snapshot) -> Self {
        AppState {
            config,
            current: RwLock::new(Arc::new(snapshot)),
            writer: tokio::sync::Mutex::new(()),
        }
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock poisoned").clone()
    }

    /// Adds a camera, persists the registry and swaps in a re-annotated
    /// snapshot.
    pub async fn add_camera(&self, entry: RegistryEntry) -> Result<()> {
        let _guard = self.writer.lock().await;
        let old = self.snapshot();
        let mut registry = old.registry.clone();
        registry.push(entry)?;
        let next = Snapshot::new(registry, old.graph.clone(), &self.config.exposure_params())?;
        write(&self.config.registry_path, &next.registry.to_string_pretty())?;
        *self.current.write().expect("snapshot lock poisoned") = Arc::new(next);
        Ok(())
    }
}
