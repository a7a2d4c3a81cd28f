//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cctv_core::camera::Camera;
use cctv_core::eval::{self, EvalConfig};
use cctv_core::localize::{self, CameraEstimate, LocalizerConfig, ValidationStatus};
use clap::{Parser, Subcommand};
use log::info;

use crate::config::{AppConfig, ConfigArgs};
use crate::error::{read_to_string, write, Error, Result};
use crate::formats::registry::RegistryEntry;
use crate::formats::{self, coco, exposure_csv, graph_json, obslog, report, route, GraphFormat};
use crate::state::{self, AppState, Snapshot};

#[derive(Debug, Parser)]
#[command(
    name = "cctv",
    version,
    about = "CCTV coverage mapping, detector scoring and camera-aware routing"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a GeoJSON camera registry and store it as the active registry.
    ImportCameras { path: PathBuf },
    /// Load a road network and store it as the active graph.
    ImportGraph {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        format: GraphFormat,
    },
    /// Plan a route between two `lat,lon` points.
    Route {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value = "default", value_parser = ["default", "privacy", "safety"])]
        mode: String,
        /// Also write the route as a GeoJSON Feature.
        #[arg(long)]
        geojson: Option<PathBuf>,
        /// Print the same JSON document as `GET /route` instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Score detections against COCO ground truth.
    Eval {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        dets: PathBuf,
        /// Second detector's results, fused with the first.
        #[arg(long, requires = "fuse")]
        dets2: Option<PathBuf>,
        #[arg(long, requires = "dets2")]
        fuse: bool,
        /// IoU at which detections from the two sources count as duplicates.
        #[arg(long, default_value_t = 0.5)]
        fuse_iou: f64,
        /// Write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn an observation log into cameras and append them to the registry.
    Localize {
        #[arg(long)]
        obs: PathBuf,
    },
    /// Check registry cameras against an observation log.
    Validate {
        #[arg(long)]
        obs: PathBuf,
    },
    /// Start the HTTP API.
    Serve,
    /// Write per-edge exposure as CSV.
    ExportExposure {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let cfg = AppConfig::resolve(&cli.config)?;
    let w = |out: &mut dyn Write, s: &str| out.write_all(s.as_bytes()).map_err(|e| Error::io("<stdout>", e));
    match cli.command {
        Command::ImportCameras { path } => {
            let registry = formats::registry::Registry::parse(&read_to_string(&path)?)?;
            write(&cfg.registry_path, &registry.to_string_pretty())?;
            info!("registry written to {}", cfg.registry_path.display());
            w(out, &format!("{}\n", registry.summary()))
        }
        Command::ImportGraph { path, format } => {
            let graph = formats::parse_graph(&read_to_string(&path)?, format)?;
            write(&cfg.graph_path, &graph_json::to_string(&graph))?;
            info!("graph written to {}", cfg.graph_path.display());
            w(
                out,
                &format!("{} nodes, {} edges\n", graph.nodes().len(), graph.edges().len()),
            )
        }
        Command::Route {
            from,
            to,
            mode,
            geojson,
            json,
        } => {
            let snap = Snapshot::load(&cfg)?;
            let req = route::build_request(Some(&from), Some(&to), Some(&mode), None, None, None, &cfg.cost)?;
            let (r, rep) = snap.route(&req)?;
            if let Some(path) = geojson {
                let mut feature = route::route_feature(&snap.graph, &r);
                feature["properties"]["report"] = route::report_value(&rep);
                feature["properties"]["mode"] = req.mode.as_str().into();
                write(
                    &path,
                    &serde_json::to_string_pretty(&feature).expect("feature serializes"),
                )?;
            }
            if json {
                let doc = route::response(&snap.graph, &req, &r, &rep);
                w(
                    out,
                    &format!("{}\n", serde_json::to_string_pretty(&doc).expect("route serializes")),
                )
            } else {
                w(
                    out,
                    &format!("mode: {}\n{}", req.mode.as_str(), route::report_text(&rep)),
                )
            }
        }
        Command::Eval {
            gt,
            dets,
            dets2,
            fuse,
            fuse_iou,
            out: report_path,
        } => {
            let truth = coco::parse_ground_truth(&read_to_string(&gt)?)?;
            let mut detections = coco::parse_results(&read_to_string(&dets)?, &truth)?;
            if let (true, Some(second)) = (fuse, dets2) {
                let other = coco::parse_results(&read_to_string(&second)?, &truth)?;
                detections = eval::fuse(&detections, &other, fuse_iou);
            }
            let rep = eval::evaluate(&detections, &truth.boxes, &EvalConfig::default())?;
            if let Some(p) = report_path {
                write(&p, &report::to_json(&rep))?;
            }
            w(out, &report::to_text(&rep))
        }
        Command::Localize { obs } => {
            let estimates = estimates(&obs)?;
            let mut registry = state::load_registry(&cfg.registry_path)?;
            let cameras = localize::cluster(&estimates, cfg.cluster_eps_m);
            let added = cameras.len();
            for camera in cameras {
                let id = next_free_id(&registry, "loc");
                registry.push(RegistryEntry::from(Camera { id, ..camera }))?;
            }
            write(&cfg.registry_path, &registry.to_string_pretty())?;
            w(
                out,
                &format!(
                    "{} observations -> {added} new cameras; registry: {}\n",
                    estimates.len(),
                    registry.summary()
                ),
            )
        }
        Command::Validate { obs } => {
            let estimates = estimates(&obs)?;
            let registry = state::load_registry(&cfg.registry_path)?;
            let rep = localize::validate_registry(&registry.cameras(), &estimates, cfg.validate_radius_m);
            let mut text = format!(
                "confirmed: {}\nunconfirmed: {}\nnovel: {}\n",
                rep.confirmed(),
                rep.unconfirmed(),
                rep.novel.len()
            );
            for c in &rep.checks {
                let status = match c.status {
                    ValidationStatus::Confirmed => "confirmed",
                    ValidationStatus::Unconfirmed => "unconfirmed",
                };
                let dist = c.nearest_m.map_or_else(|| "-".to_string(), |d| format!("{d:.1} m"));
                text.push_str(&format!("{} {status} {dist}\n", c.camera_id));
            }
            w(out, &text)
        }
        Command::Serve => {
            let snap = Snapshot::load(&cfg)?;
            let state = Arc::new(AppState::new(cfg, snap));
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io("<runtime>", e))?;
            runtime
                .block_on(crate::api::serve(state))
                .map_err(|e| Error::io("<listener>", e))
        }
        Command::ExportExposure { out: path } => {
            let snap = Snapshot::load(&cfg)?;
            let mut buf = Vec::new();
            exposure_csv::write(&snap.graph, &snap.exposure, &mut buf)
                .map_err(|e| Error::io("<csv>", std::io::Error::other(e)))?;
            let text = String::from_utf8(buf).expect("csv output is UTF-8");
            match path {
                Some(p) => write(&p, &text),
                None => w(out, &text),
            }
        }
    }
}

fn estimates(path: &Path) -> Result<Vec<CameraEstimate>> {
    let observations = obslog::parse(&read_to_string(path)?)?;
    let cfg = LocalizerConfig::default();
    observations
        .iter()
        .map(|o| localize::localize(o, &cfg).map_err(Error::from))
        .collect()
}

fn next_free_id(registry: &formats::registry::Registry, prefix: &str) -> String {
    (1..)
        .map(|n| format!("{prefix}-{n}"))
        .find(|id| !registry.contains(id))
        .expect("unbounded id space")
}
