//! HTTP API.
//!
//! * `GET /health` -> `ok`
//! * `GET /cameras` -> registry FeatureCollection, each feature carrying a
//!   `zone_polygon` ring
//! * `GET /route?from=lat,lon&to=lat,lon&mode=&lambda=&beta=&penalty=`
//! * `POST /cameras` with one GeoJSON Feature -> 201
//!
//! Errors are JSON `{"error": ..., "field": ...}` with status 400 for bad
//! input, 404 for unknown paths and 422 when no route exists.

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use cctv_core::camera::{coverage_zone, zone_polygon};
use cctv_core::graph::GraphError;
use cctv_core::router::RouteError;
use log::error;
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::error::Error;
use crate::formats::registry::{feature_from_value, feature_to_value};
use crate::formats::route;
use crate::state::AppState;

/// Vertex spacing of the zone rings sent to clients.
pub const ZONE_ARC_STEP_DEG: f64 = 10.0;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    field: Option<String>,
}

impl ApiError {
    fn bad_request(field: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
            field: Some(field.to_string()),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Route(RouteError::NoPath) | Error::Route(RouteError::SnapFailure(GraphError::EmptyGraph)) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            Error::Io { .. } | Error::Exposure(_) | Error::Config(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        if status == StatusCode::INTERNAL_SERVER_ERROR {
            error!("{e}");
            return ApiError {
                status,
                message: "internal error".into(),
                field: None,
            };
        }
        ApiError {
            status,
            field: e.field().map(str::to_string),
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": self.message, "field": self.field});
        (self.status, Json(body)).into_response()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let origin = match state.config.cors_origin.as_str() {
        "*" => AllowOrigin::any(),
        o => AllowOrigin::exact(HeaderValue::from_str(o).unwrap_or(HeaderValue::from_static("null"))),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST, Method::OPTIONS])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/health", get(health))
        .route("/cameras", get(list_cameras).post(add_camera))
        .route("/route", get(plan_route))
        .fallback(not_found)
        .layer(cors)
        .with_state(state)
}

async fn health() -> &'static str {
    "ok"
}

async fn not_found() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        message: "not found".into(),
        field: None,
    }
}

/// Registry as GeoJSON with a `zone_polygon` ring (`[[lon, lat], ...]`)
/// in each feature's properties.
pub fn cameras_value(state: &AppState) -> Value {
    let snap = state.snapshot();
    let features: Vec<Value> = snap
        .registry
        .entries
        .iter()
        .map(|entry| {
            let mut f = feature_to_value(entry);
            if let Ok(zone) = coverage_zone(&entry.camera) {
                let ring: Vec<[f64; 2]> = zone_polygon(&zone, ZONE_ARC_STEP_DEG)
                    .iter()
                    .map(|p| [p.lon, p.lat])
                    .collect();
                f["properties"]["zone_polygon"] = json!(ring);
            }
            f
        })
        .collect();
    json!({"type": "FeatureCollection", "features": features})
}

async fn list_cameras(State(state): State<Arc<AppState>>) -> Json<Value> {
    Json(cameras_value(&state))
}

async fn add_camera(State(state): State<Arc<AppState>>, body: Bytes) -> Result<(StatusCode, Json<Value>), ApiError> {
    let value: Value =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request("body", format!("invalid JSON: {e}")))?;
    let entry = feature_from_value(&value, "")?;
    let out = feature_to_value(&entry);
    state.add_camera(entry).await?;
    Ok((StatusCode::CREATED, Json(out)))
}

async fn plan_route(
    State(state): State<Arc<AppState>>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Json<Value>, ApiError> {
    let get = |k: &str| q.get(k).map(String::as_str);
    let req = route::build_request(
        get("from"),
        get("to"),
        get("mode"),
        route::parse_opt_number(get("lambda"), "lambda")?,
        route::parse_opt_number(get("beta"), "beta")?,
        route::parse_opt_number(get("penalty"), "penalty")?,
        &state.config.cost,
    )?;
    let snap = state.snapshot();
    let (r, report) = snap.route(&req)?;
    Ok(Json(route::response(&snap.graph, &req, &r, &report)))
}

pub async fn serve(state: Arc<AppState>) -> std::io::Result<()> {
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], state.config.listen_port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
