//! Route responses, shared by `cctv route --json` and `GET /route`.

use cctv_core::graph::RoadGraph;
use cctv_core::router::{CostParams, ExposureReport, Route, RouteMode, RouteRequest};
use cctv_core::GeoPoint;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Parses `lat,lon`.
pub fn parse_point(s: &str, field: &str) -> Result<GeoPoint> {
    let bad = || Error::invalid(field, format!("expected `lat,lon`, found `{s}`"));
    let (lat, lon) = s.split_once(',').ok_or_else(bad)?;
    let lat: f64 = lat.trim().parse().map_err(|_| bad())?;
    let lon: f64 = lon.trim().parse().map_err(|_| bad())?;
    GeoPoint::new(lat, lon).map_err(|e| Error::invalid(field, e.to_string()))
}

pub fn parse_opt_number(s: Option<&str>, field: &str) -> Result<Option<f64>> {
    s.map(|v| {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::invalid(field, format!("not a number: `{v}`")))
    })
    .transpose()
}

/// Builds a validated request; unset parameters fall back to `defaults`.
pub fn build_request(
    from: Option<&str>,
    to: Option<&str>,
    mode: Option<&str>,
    lambda: Option<f64>,
    beta: Option<f64>,
    penalty: Option<f64>,
    defaults: &CostParams,
) -> Result<RouteRequest> {
    let from = parse_point(from.ok_or_else(|| Error::invalid("from", "missing"))?, "from")?;
    let to = parse_point(to.ok_or_else(|| Error::invalid("to", "missing"))?, "to")?;
    let mode = match mode {
        None => RouteMode::Default,
        Some(m) => RouteMode::parse(m)
            .ok_or_else(|| Error::invalid("mode", format!("expected default, privacy or safety, found `{m}`")))?,
    };
    let params = CostParams {
        lambda: lambda.unwrap_or(defaults.lambda),
        beta: beta.unwrap_or(defaults.beta),
        camera_penalty_m: penalty.unwrap_or(defaults.camera_penalty_m),
    };
    params.validate()?;
    Ok(RouteRequest::new(from, to, mode).with_params(params))
}

pub fn report_value(r: &ExposureReport) -> Value {
    json!({
        "distinct_cameras": r.distinct_cameras,
        "exposed_m": r.exposed_m,
        "total_m": r.total_m,
        "exposure_share": r.exposure_share,
        "detour_ratio": r.detour_ratio,
    })
}

/// GeoJSON LineString Feature for the route.
pub fn route_feature(graph: &RoadGraph, route: &Route) -> Value {
    let coords: Vec<[f64; 2]> = route.geometry.iter().map(|p| [p.lon, p.lat]).collect();
    let edges: Vec<Value> = route
        .legs
        .iter()
        .map(|l| {
            json!({
                "id": graph.edge(l.edge).key,
                "forward": l.forward(),
                "start": l.start,
                "end": l.end,
                "length_m": l.length_m,
            })
        })
        .collect();
    json!({
        "type": "Feature",
        "geometry": {"type": "LineString", "coordinates": coords},
        "properties": {
            "total_m": route.total_m,
            "total_cost": route.total_cost,
            "edges": edges,
        },
    })
}

/// `{route, report, mode, params}`
pub fn response(graph: &RoadGraph, req: &RouteRequest, route: &Route, report: &ExposureReport) -> Value {
    json!({
        "route": route_feature(graph, route),
        "report": report_value(report),
        "mode": req.mode.as_str(),
        "params": {
            "lambda": req.params.lambda,
            "beta": req.params.beta,
            "camera_penalty_m": req.params.camera_penalty_m,
        },
    })
}

pub fn report_text(r: &ExposureReport) -> String {
    format!(
        "total_m: {:.2}\nexposed_m: {:.2}\ndistinct_cameras: {}\nexposure_share: {:.4}\ndetour_ratio: {:.4}\n",
        r.total_m, r.exposed_m, r.distinct_cameras, r.exposure_share, r.detour_ratio
    )
}
