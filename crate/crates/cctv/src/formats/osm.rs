//! Minimal OSM XML reader.
//!
//! Every `<way>` with a `highway` tag becomes a chain of edges between
//! consecutive node refs, keyed `{way id}:{segment index}`. Only nodes used
//! by such ways are kept, in document order. Relations and other elements
//! are ignored.

use std::collections::HashMap;

use cctv_core::geo;
use cctv_core::graph::{pedestrian_oneway, EdgeSpec, GraphBuilder, RoadGraph};
use cctv_core::GeoPoint;
use log::warn;

use crate::error::{Error, Result};

fn attr<'a>(node: roxmltree::Node<'a, '_>, name: &str) -> Result<&'a str> {
    node.attribute(name).ok_or_else(|| {
        let pos = node.document().text_pos_at(node.range().start);
        Error::Syntax {
            what: "osm".into(),
            line: pos.row as usize,
            column: pos.col as usize,
            message: format!("<{}> without `{name}`", node.tag_name().name()),
        }
    })
}

fn coordinate(node: roxmltree::Node, name: &str) -> Result<f64> {
    let raw = attr(node, name)?;
    raw.parse().map_err(|_| {
        let pos = node.document().text_pos_at(node.range().start);
        Error::Syntax {
            what: "osm".into(),
            line: pos.row as usize,
            column: pos.col as usize,
            message: format!("`{name}` is not a number: {raw}"),
        }
    })
}

/// Leading number of a width tag such as `6`, `6.5` or `6 m`.
fn parse_width(raw: &str) -> Option<f64> {
    let end = raw
        .find(|c: char| !(c.is_ascii_digit() || c == '.'))
        .unwrap_or(raw.len());
    raw[..end].parse().ok().filter(|w: &f64| *w > 0.0)
}

struct Way<'a> {
    id: &'a str,
    refs: Vec<&'a str>,
    highway: &'a str,
    oneway: bool,
    width: Option<f64>,
}

pub fn parse(text: &str) -> Result<RoadGraph> {
    let doc = roxmltree::Document::parse(text).map_err(|e| {
        let pos = e.pos();
        Error::Syntax {
            what: "osm".into(),
            line: pos.row as usize,
            column: pos.col as usize,
            message: e.to_string(),
        }
    })?;
    let root = doc.root_element();

    let mut positions: Vec<(&str, GeoPoint)> = Vec::new();
    let mut ways = Vec::new();
    for el in root.children().filter(|n| n.is_element()) {
        match el.tag_name().name() {
            "node" => {
                let id = attr(el, "id")?;
                let p = GeoPoint::new(coordinate(el, "lat")?, coordinate(el, "lon")?)
                    .map_err(|e| Error::invalid(format!("node {id}"), e.to_string()))?;
                positions.push((id, p));
            }
            "way" => {
                let mut tags = HashMap::new();
                let mut refs = Vec::new();
                for c in el.children().filter(|n| n.is_element()) {
                    match c.tag_name().name() {
                        "nd" => refs.push(attr(c, "ref")?),
                        "tag" => {
                            tags.insert(attr(c, "k")?, attr(c, "v")?);
                        }
                        _ => {}
                    }
                }
                let Some(&highway) = tags.get("highway") else {
                    continue;
                };
                let id = attr(el, "id")?;
                let width = tags.get("width").and_then(|w| {
                    let parsed = parse_width(w);
                    if parsed.is_none() {
                        warn!("way {id}: ignoring unparseable width `{w}`");
                    }
                    parsed
                });
                ways.push(Way {
                    id,
                    refs,
                    highway,
                    oneway: matches!(tags.get("oneway").copied(), Some("yes" | "true" | "1")),
                    width,
                });
            }
            _ => {}
        }
    }

    let lookup: HashMap<&str, GeoPoint> = positions.iter().copied().collect();
    let mut used = std::collections::HashSet::new();
    for w in &ways {
        for r in &w.refs {
            if !lookup.contains_key(r) {
                return Err(Error::UnknownNodeRef {
                    way: w.id.to_string(),
                    node: r.to_string(),
                });
            }
            used.insert(*r);
        }
    }

    let mut b = GraphBuilder::new();
    for (id, p) in &positions {
        if used.contains(id) {
            b.add_node(*id, *p)?;
        }
    }
    for w in &ways {
        let oneway = pedestrian_oneway(w.highway, w.oneway);
        for (k, pair) in w.refs.windows(2).enumerate() {
            if geo::haversine_m(lookup[pair[0]], lookup[pair[1]]) == 0.0 {
                warn!("way {}: skipping zero-length segment {} -> {}", w.id, pair[0], pair[1]);
                continue;
            }
            b.add_edge(EdgeSpec {
                key: format!("{}:{k}", w.id),
                from: pair[0].to_string(),
                to: pair[1].to_string(),
                width_m: w.width,
                oneway,
                ..EdgeSpec::default()
            })?;
        }
    }
    Ok(b.build())
}
