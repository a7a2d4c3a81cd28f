//! File formats.

pub mod coco;
pub mod exposure_csv;
pub mod graph_json;
pub mod obslog;
pub mod osm;
pub mod registry;
pub mod report;
pub mod route;

use cctv_core::graph::RoadGraph;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphFormat {
    /// Guess from the first non-blank character.
    Auto,
    Json,
    Osm,
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<RoadGraph> {
    let format = match format {
        GraphFormat::Auto if text.trim_start().starts_with('<') => GraphFormat::Osm,
        GraphFormat::Auto => GraphFormat::Json,
        f => f,
    };
    match format {
        GraphFormat::Osm => osm::parse(text),
        _ => graph_json::parse(text),
    }
}
