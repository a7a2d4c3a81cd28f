//! Camera registry as a GeoJSON FeatureCollection of Points.
//!
//! Properties understood: `id`, `kind`, `heading_deg`, `fov_deg`,
//! `range_m`, `source`, `confidence`. Anything else, on the features or on
//! the collection, is carried through unchanged.

use cctv_core::camera::{
    Camera, CameraKind, CameraSource, DEFAULT_DIRECTED_FOV_DEG, DEFAULT_DIRECTED_RANGE_M, DEFAULT_ROUND_RANGE_M,
};
use cctv_core::GeoPoint;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

const KNOWN: [&str; 7] = [
    "id",
    "kind",
    "heading_deg",
    "fov_deg",
    "range_m",
    "source",
    "confidence",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RegistryEntry {
    pub camera: Camera,
    /// Unrecognised properties.
    pub extra: Map<String, Value>,
}

impl From<Camera> for RegistryEntry {
    fn from(camera: Camera) -> Self {
        RegistryEntry {
            camera,
            extra: Map::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Registry {
    pub entries: Vec<RegistryEntry>,
    /// Foreign members of the FeatureCollection object.
    pub extra: Map<String, Value>,
}

fn number(props: &Map<String, Value>, key: &str, field: &str) -> Result<Option<f64>> {
    match props.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| Error::invalid(format!("{field}.{key}"), "expected a number")),
    }
}

fn text<'a>(props: &'a Map<String, Value>, key: &str, field: &str) -> Result<Option<&'a str>> {
    match props.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(Error::invalid(format!("{field}.{key}"), "expected a string")),
    }
}

/// Parses one Feature. `path` prefixes field names in errors.
pub fn feature_from_value(v: &Value, path: &str) -> Result<RegistryEntry> {
    let at = |f: &str| {
        if path.is_empty() {
            f.to_string()
        } else {
            format!("{path}.{f}")
        }
    };
    let obj = v
        .as_object()
        .ok_or_else(|| Error::invalid(at("feature"), "expected an object"))?;
    if obj.get("type").and_then(Value::as_str) != Some("Feature") {
        return Err(Error::invalid(at("type"), "expected \"Feature\""));
    }
    let geometry = obj
        .get("geometry")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::invalid(at("geometry"), "expected a Point geometry"))?;
    if geometry.get("type").and_then(Value::as_str) != Some("Point") {
        return Err(Error::invalid(at("geometry.type"), "expected \"Point\""));
    }
    let coords = geometry
        .get("coordinates")
        .and_then(Value::as_array)
        .filter(|c| c.len() >= 2)
        .and_then(|c| Some((c[0].as_f64()?, c[1].as_f64()?)))
        .ok_or_else(|| Error::invalid(at("geometry.coordinates"), "expected [lon, lat]"))?;
    let position =
        GeoPoint::new(coords.1, coords.0).map_err(|e| Error::invalid(at("geometry.coordinates"), e.to_string()))?;

    let field = at("properties");
    let props = obj
        .get("properties")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::invalid(&field, "expected an object"))?;
    let id = text(props, "id", &field)?
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::invalid(format!("{field}.id"), "missing camera id"))?;
    let kind = text(props, "kind", &field)?
        .and_then(CameraKind::parse)
        .ok_or_else(|| Error::invalid(format!("{field}.kind"), "expected \"directed\" or \"round\""))?;
    let source = match text(props, "source", &field)? {
        None => CameraSource::Registry,
        Some(s) => CameraSource::parse(s).ok_or_else(|| {
            Error::invalid(
                format!("{field}.source"),
                "expected \"registry\", \"localized\" or \"imported\"",
            )
        })?,
    };
    let heading_deg = number(props, "heading_deg", &field)?;
    let fov_deg = number(props, "fov_deg", &field)?;
    let camera = Camera {
        id: id.to_string(),
        position,
        kind,
        heading_deg,
        fov_deg: match kind {
            CameraKind::Directed => fov_deg.or(Some(DEFAULT_DIRECTED_FOV_DEG)),
            CameraKind::Round => fov_deg,
        },
        range_m: number(props, "range_m", &field)?.unwrap_or(match kind {
            CameraKind::Directed => DEFAULT_DIRECTED_RANGE_M,
            CameraKind::Round => DEFAULT_ROUND_RANGE_M,
        }),
        source,
        confidence: number(props, "confidence", &field)?.unwrap_or(1.0),
    };
    camera
        .validate()
        .map_err(|e| Error::invalid(format!("{field}.{}", e.field), e.reason))?;
    let extra = props
        .iter()
        .filter(|(k, _)| !KNOWN.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Ok(RegistryEntry { camera, extra })
}

pub fn feature_to_value(entry: &RegistryEntry) -> Value {
    let c = &entry.camera;
    let mut props = Map::new();
    props.insert("id".into(), json!(c.id));
    props.insert("kind".into(), json!(c.kind.as_str()));
    if let Some(h) = c.heading_deg {
        props.insert("heading_deg".into(), json!(h));
    }
    if let Some(f) = c.fov_deg {
        props.insert("fov_deg".into(), json!(f));
    }
    props.insert("range_m".into(), json!(c.range_m));
    props.insert("source".into(), json!(c.source.as_str()));
    props.insert("confidence".into(), json!(c.confidence));
    for (k, v) in &entry.extra {
        props.insert(k.clone(), v.clone());
    }
    json!({
        "type": "Feature",
        "geometry": {"type": "Point", "coordinates": [c.position.lon, c.position.lat]},
        "properties": props,
    })
}

impl Registry {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::json("camera registry", &e))?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .filter(|o| o.get("type").and_then(Value::as_str) == Some("FeatureCollection"))
            .ok_or_else(|| Error::invalid("type", "expected a FeatureCollection"))?;
        let features = obj
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::invalid("features", "expected an array"))?;
        let mut registry = Registry {
            entries: Vec::with_capacity(features.len()),
            extra: obj
                .iter()
                .filter(|(k, _)| *k != "type" && *k != "features")
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        };
        for (i, f) in features.iter().enumerate() {
            let entry = feature_from_value(f, &format!("features[{i}]"))?;
            registry
                .push(entry)
                .map_err(|_| Error::invalid(format!("features[{i}].properties.id"), "duplicate camera id"))?;
        }
        Ok(registry)
    }

    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("type".into(), json!("FeatureCollection"));
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        obj.insert(
            "features".into(),
            Value::Array(self.entries.iter().map(feature_to_value).collect()),
        );
        Value::Object(obj)
    }

    pub fn to_string_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("registry serializes");
        s.push('\n');
        s
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.iter().any(|e| e.camera.id == id)
    }

    /// Appends an entry, rejecting duplicate ids.
    pub fn push(&mut self, entry: RegistryEntry) -> Result<()> {
        if self.contains(&entry.camera.id) {
            return Err(Error::invalid(
                "properties.id",
                format!("duplicate camera id `{}`", entry.camera.id),
            ));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn cameras(&self) -> Vec<Camera> {
        self.entries.iter().map(|e| e.camera.clone()).collect()
    }

    /// e.g. `3 cameras (2 directed, 1 round)`
    pub fn summary(&self) -> String {
        let directed = self
            .entries
            .iter()
            .filter(|e| e.camera.kind == CameraKind::Directed)
            .count();
        let n = self.entries.len();
        format!(
            "{n} camera{} ({directed} directed, {} round)",
            if n == 1 { "" } else { "s" },
            n - directed
        )
    }
}
