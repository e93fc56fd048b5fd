//! Axum router: the rewrite API, a health check, static UI files and CORS.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::extract::State;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ginaz::translate::MtBackend;
use ginaz::Engine;
use serde::Serialize;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::services::ServeDir;

use crate::api::{handle_rewrite, ApiError, MAX_TEXT_BYTES};

/// Request bodies beyond this are rejected before parsing. JSON escaping can
/// inflate text up to six times, so the limit sits well above the text limit.
pub const MAX_BODY_BYTES: usize = 8 * MAX_TEXT_BYTES;

#[derive(Clone)]
pub struct AppState {
    pub engine: Arc<Engine>,
    pub backend: Arc<MtBackend>,
}

impl AppState {
    pub fn new(engine: Engine, backend: MtBackend) -> Self {
        AppState { engine: Arc::new(engine), backend: Arc::new(backend) }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ServerOptions {
    pub static_dir: Option<PathBuf>,
    /// Allowed browser origin; any origin when unset.
    pub cors_origin: Option<String>,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self.body())).into_response()
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Health {
    status: &'static str,
    model_version: String,
}

async fn health(State(state): State<AppState>) -> Json<Health> {
    Json(Health { status: "ok", model_version: state.engine.bundle().fingerprint() })
}

async fn rewrite(State(state): State<AppState>, body: Body) -> Response {
    let bytes = match to_bytes(body, MAX_BODY_BYTES).await {
        Ok(b) => b,
        Err(e) => return ApiError::BadRequest(format!("request body rejected: {e}")).into_response(),
    };
    let result =
        tokio::task::spawn_blocking(move || handle_rewrite(&state.engine, &state.backend, &bytes)).await;
    match result {
        Ok(Ok(response)) => Json(response).into_response(),
        Ok(Err(e)) => e.into_response(),
        Err(e) => ApiError::Internal(e.to_string()).into_response(),
    }
}

fn cors(origin: Option<&str>) -> anyhow::Result<CorsLayer> {
    let layer = CorsLayer::new()
        .allow_methods([Method::GET, Method::POST, Method::OPTIONS])
        .allow_headers([header::CONTENT_TYPE]);
    Ok(match origin {
        Some(o) => layer.allow_origin(AllowOrigin::exact(HeaderValue::from_str(o)?)),
        None => layer.allow_origin(Any),
    })
}

pub fn router(state: AppState, options: &ServerOptions) -> anyhow::Result<Router> {
    let mut app = Router::new()
        .route("/api/rewrite", post(rewrite))
        .route("/api/health", get(health))
        .with_state(state);
    if let Some(dir) = &options.static_dir {
        app = app.fallback_service(ServeDir::new(dir).append_index_html_on_directories(true));
    }
    Ok(app.layer(cors(options.cors_origin.as_deref())?))
}

pub async fn serve(state: AppState, options: ServerOptions, addr: SocketAddr) -> anyhow::Result<()> {
    let app = router(state, &options)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await?;
    Ok(())
}
