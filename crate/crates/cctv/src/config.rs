//! Settings resolved from flags, `CCTV_*` environment variables, an
//! optional TOML file and built-in defaults, in that order of precedence.

use std::path::{Path, PathBuf};

use cctv_core::exposure::ExposureParams;
use cctv_core::localize::{DEFAULT_CLUSTER_EPS_M, DEFAULT_VALIDATE_RADIUS_M};
use cctv_core::router::CostParams;
use serde::Deserialize;

use crate::error::{read_to_string, Error, Result};

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_REGISTRY: &str = "cctv-registry.geojson";
pub const DEFAULT_GRAPH: &str = "cctv-graph.json";

#[derive(Debug, Clone, PartialEq)]
pub struct AppConfig {
    pub registry_path: PathBuf,
    pub graph_path: PathBuf,
    pub listen_port: u16,
    pub cost: CostParams,
    pub sample_interval_m: f64,
    pub cluster_eps_m: f64,
    pub validate_radius_m: f64,
    /// Value of `Access-Control-Allow-Origin`.
    pub cors_origin: String,
}

impl Default for AppConfig {
    fn default() -> Self {
        AppConfig {
            registry_path: DEFAULT_REGISTRY.into(),
            graph_path: DEFAULT_GRAPH.into(),
            listen_port: DEFAULT_PORT,
            cost: CostParams::default(),
            sample_interval_m: ExposureParams::default().sample_interval_m,
            cluster_eps_m: DEFAULT_CLUSTER_EPS_M,
            validate_radius_m: DEFAULT_VALIDATE_RADIUS_M,
            cors_origin: "*".into(),
        }
    }
}

/// Contents of the TOML config file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub registry_path: Option<PathBuf>,
    pub graph_path: Option<PathBuf>,
    pub listen_port: Option<u16>,
    pub lambda: Option<f64>,
    pub beta: Option<f64>,
    pub camera_penalty_m: Option<f64>,
    pub sample_interval_m: Option<f64>,
    pub cluster_eps_m: Option<f64>,
    pub validate_radius_m: Option<f64>,
    pub cors_origin: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct ConfigArgs {
    /// TOML config file.
    #[arg(long, env = "CCTV_CONFIG", global = true)]
    pub config: Option<PathBuf>,
    /// Camera registry (GeoJSON).
    #[arg(long, env = "CCTV_REGISTRY", global = true)]
    pub registry: Option<PathBuf>,
    /// Road graph (native JSON).
    #[arg(long, env = "CCTV_GRAPH", global = true)]
    pub graph: Option<PathBuf>,
    #[arg(long, env = "CCTV_PORT", global = true)]
    pub port: Option<u16>,
    /// Privacy weight on covered length.
    #[arg(long, env = "CCTV_LAMBDA", global = true)]
    pub lambda: Option<f64>,
    /// Safety discount on covered length, in [0, 0.9].
    #[arg(long, env = "CCTV_BETA", global = true)]
    pub beta: Option<f64>,
    /// Privacy penalty per camera on an edge, in metres.
    #[arg(long, env = "CCTV_PENALTY", global = true)]
    pub penalty: Option<f64>,
    #[arg(long, env = "CCTV_SAMPLE_INTERVAL", global = true)]
    pub sample_interval: Option<f64>,
    /// Clustering distance for localized sightings.
    #[arg(long, env = "CCTV_EPS", global = true)]
    pub eps: Option<f64>,
    /// Match radius when validating the registry.
    #[arg(long, env = "CCTV_RADIUS", global = true)]
    pub radius: Option<f64>,
    #[arg(long, env = "CCTV_CORS_ORIGIN", global = true)]
    pub cors_origin: Option<String>,
}

impl AppConfig {
    pub fn resolve(args: &ConfigArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let d = AppConfig::default();
        let cfg = AppConfig {
            registry_path: args.registry.clone().or(file.registry_path).unwrap_or(d.registry_path),
            graph_path: args.graph.clone().or(file.graph_path).unwrap_or(d.graph_path),
            listen_port: args.port.or(file.listen_port).unwrap_or(d.listen_port),
            cost: CostParams {
                lambda: args.lambda.or(file.lambda).unwrap_or(d.cost.lambda),
                beta: args.beta.or(file.beta).unwrap_or(d.cost.beta),
                camera_penalty_m: args
                    .penalty
                    .or(file.camera_penalty_m)
                    .unwrap_or(d.cost.camera_penalty_m),
            },
            sample_interval_m: args
                .sample_interval
                .or(file.sample_interval_m)
                .unwrap_or(d.sample_interval_m),
            cluster_eps_m: args.eps.or(file.cluster_eps_m).unwrap_or(d.cluster_eps_m),
            validate_radius_m: args.radius.or(file.validate_radius_m).unwrap_or(d.validate_radius_m),
            cors_origin: args.cors_origin.clone().or(file.cors_origin).unwrap_or(d.cors_origin),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.cost.validate()?;
        self.exposure_params().validate()?;
        if !(self.cluster_eps_m > 0.0 && self.cluster_eps_m.is_finite()) {
            return Err(Error::invalid("cluster_eps_m", "must be a positive number"));
        }
        if !(self.validate_radius_m > 0.0 && self.validate_radius_m.is_finite()) {
            return Err(Error::invalid("validate_radius_m", "must be a positive number"));
        }
        Ok(())
    }

    pub fn exposure_params(&self) -> ExposureParams {
        ExposureParams {
            sample_interval_m: self.sample_interval_m,
            ..ExposureParams::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cctv.toml");
        std::fs::write(&path, "lambda = 3.0\nbeta = 0.5\nlisten_port = 9000\n").unwrap();
        let args = ConfigArgs {
            config: Some(path),
            lambda: Some(7.0),
            ..ConfigArgs::default()
        };
        let cfg = AppConfig::resolve(&args).unwrap();
        assert_eq!(cfg.cost.lambda, 7.0);
        assert_eq!(cfg.cost.beta, 0.5);
        assert_eq!(cfg.listen_port, 9000);
        assert_eq!(cfg.cost.camera_penalty_m, 50.0);
        assert_eq!(cfg.sample_interval_m, 1.0);
    }

    #[test]
    fn rejects_out_of_range_and_unknown_keys() {
        let args = ConfigArgs {
            beta: Some(0.95),
            ..ConfigArgs::default()
        };
        assert_eq!(AppConfig::resolve(&args).unwrap_err().field(), Some("beta"));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cctv.toml");
        std::fs::write(&path, "lamda = 3.0\n").unwrap();
        let args = ConfigArgs {
            config: Some(path),
            ..ConfigArgs::default()
        };
        assert!(matches!(AppConfig::resolve(&args), Err(Error::Config(_))));
    }
}
