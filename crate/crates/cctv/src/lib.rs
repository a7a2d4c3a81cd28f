//! Files, command-line tools and the HTTP service around `cctv-core`.

pub mod api;
pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod state;

pub use config::AppConfig;
pub use error::{Error, Result};
pub use state::{AppState, Snapshot};
