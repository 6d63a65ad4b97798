//! HTTP front end: `POST /v1/{validate,generate,analyze}` and
//! `GET /v1/health`.
//!
//! Requests carry `{"model_text": "..."}` and optionally an `operation`
//! that must match the route. Responses are the serialized
//! [`Outcome`](crate::ops::Outcome) of the same operation the CLI runs.

use std::net::SocketAddr;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ops::{self, Operation};

pub const DEFAULT_PORT: u16 = 8470;
pub const MAX_BODY_BYTES: usize = 1 << 20;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Request {
    model_text: String,
    #[serde(default)]
    operation: Option<String>,
}

fn json_response(status: StatusCode, body: &impl Serialize) -> Response {
    match serde_json::to_string_pretty(body) {
        Ok(mut text) => {
            text.push('\n');
            (status, [(header::CONTENT_TYPE, "application/json")], text).into_response()
        }
        Err(e) => internal_error(&e.to_string()),
    }
}

fn bad_request(message: impl Into<String>) -> Response {
    json_response(StatusCode::BAD_REQUEST, &json!({ "status": "error", "message": message.into() }))
}

fn internal_error(detail: &str) -> Response {
    let id = uuid::Uuid::new_v4();
    eprintln!("request {id} failed: {detail}");
    let body = json!({ "status": "error", "message": "internal error", "error_id": id.to_string() });
    (StatusCode::INTERNAL_SERVER_ERROR, [(header::CONTENT_TYPE, "application/json")], body.to_string()).into_response()
}

async fn health() -> Response {
    json_response(StatusCode::OK, &json!({ "status": "ok" }))
}

async fn handle(Path(op): Path<String>, body: Bytes) -> Response {
    let op: Operation = match op.parse() {
        Ok(op) => op,
        Err(e) => return bad_request(e.to_string()),
    };
    let request: Request = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return bad_request(format!("malformed request: {e}")),
    };
    if let Some(named) = &request.operation {
        match named.parse::<Operation>() {
            Ok(n) if n == op => {}
            Ok(n) => return bad_request(format!("operation {n} does not match endpoint /v1/{op}")),
            Err(e) => return bad_request(e.to_string()),
        }
    }
    if request.model_text.trim().is_empty() {
        return bad_request("model_text is empty");
    }
    let source = ops::SourceFile::new("<request>", request.model_text);
    let result = tokio::task::spawn_blocking(move || ops::run(op, &source)).await;
    match result {
        Ok(Ok(outcome)) => json_response(StatusCode::OK, &outcome),
        Ok(Err(e)) => internal_error(&e.to_string()),
        Err(e) => internal_error(&e.to_string()),
    }
}

/// The service routes, with the request size cap applied.
pub fn router() -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/{op}", post(handle))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
}

/// Port from `IOTFORGE_PORT`, or [`DEFAULT_PORT`] when unset.
pub fn port_from_env() -> Result<u16, String> {
    match std::env::var("IOTFORGE_PORT") {
        Ok(v) => v.trim().parse().map_err(|_| format!("IOTFORGE_PORT is not a port number: {v}")),
        Err(_) => Ok(DEFAULT_PORT),
    }
}

pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router()).await
}
