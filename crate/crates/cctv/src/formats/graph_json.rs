//! Native graph document, version `cctv-graph/1`.
//!
//! ```json
//! {"version": "cctv-graph/1",
//!  "nodes": [{"id": "a", "lat": 52.5, "lon": 13.4}],
//!  "edges": [{"id": "ab", "from": "a", "to": "b", "length_m": 71.2,
//!             "width_m": 8, "oneway": false, "geometry": [[52.5, 13.4], ...]}]}
//! ```
//! `length_m`, `width_m`, `oneway` and `geometry` are optional.

use cctv_core::graph::{EdgeSpec, GraphBuilder, RoadGraph};
use cctv_core::GeoPoint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const VERSION: &str = "cctv-graph/1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: String,
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    id: String,
    lat: f64,
    lon: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    id: String,
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width_m: Option<f64>,
    #[serde(default)]
    oneway: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    geometry: Option<Vec<[f64; 2]>>,
}

pub fn parse(text: &str) -> Result<RoadGraph> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::json("graph", &e))?;
    if doc.version != VERSION {
        return Err(Error::invalid(
            "version",
            format!("expected \"{VERSION}\", found \"{}\"", doc.version),
        ));
    }
    let mut b = GraphBuilder::new();
    for (i, n) in doc.nodes.iter().enumerate() {
        let p = GeoPoint::new(n.lat, n.lon).map_err(|e| Error::invalid(format!("nodes[{i}]"), e.to_string()))?;
        b.add_node(n.id.clone(), p)?;
    }
    for (i, e) in doc.edges.into_iter().enumerate() {
        let geometry = match e.geometry {
            None => None,
            Some(pts) => Some(
                pts.iter()
                    .map(|&[lat, lon]| GeoPoint::new(lat, lon))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|err| Error::invalid(format!("edges[{i}].geometry"), err.to_string()))?,
            ),
        };
        b.add_edge(EdgeSpec {
            key: e.id,
            from: e.from,
            to: e.to,
            length_m: e.length_m,
            width_m: e.width_m,
            oneway: e.oneway,
            geometry,
        })?;
    }
    Ok(b.build())
}

/// Writes every edge attribute explicitly, so the output re-parses to an
/// identical graph.
pub fn to_string(graph: &RoadGraph) -> String {
    let doc = Document {
        version: VERSION.to_string(),
        nodes: graph
            .nodes()
            .iter()
            .map(|n| NodeDoc {
                id: n.key.clone(),
                lat: n.position.lat,
                lon: n.position.lon,
            })
            .collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                id: e.key.clone(),
                from: graph.node(e.from).key.clone(),
                to: graph.node(e.to).key.clone(),
                length_m: Some(e.length_m),
                width_m: Some(e.width_m),
                oneway: e.oneway,
                geometry: Some(e.geometry.iter().map(|p| [p.lat, p.lon]).collect()),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
    s.push('\n');
    s
}
