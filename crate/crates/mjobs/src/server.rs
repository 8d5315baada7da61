//! JSON HTTP service over loaded artifacts.
//!
//! Routes live under `/api/v1`. Until the artifacts finish loading every
//! route except unknown ones answers 503. Recommendation work runs on the
//! blocking pool so health checks stay responsive under load.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mjobs_core::artifacts::{self, ArtifactManifest};
use mjobs_core::ingest::PostingId;
use mjobs_core::ranker::{PairScorer, RankerConfig};
use mjobs_core::Engine;
use serde_json::{json, Value};

use crate::api::{self, ApiError, RecommendRequest};

/// Everything a request needs once loading has finished.
pub struct Service {
    pub engine: Engine,
    pub manifest: Option<ArtifactManifest>,
    pub scorer: Box<dyn PairScorer>,
    pub defaults: RankerConfig,
}

#[derive(Clone, Default)]
pub struct AppState {
    service: Arc<OnceLock<Service>>,
}

impl AppState {
    pub fn ready(service: Service) -> Self {
        let state = Self::default();
        state.install(service);
        state
    }

    /// Makes the service visible to requests. Later calls are ignored.
    pub fn install(&self, service: Service) {
        let _ = self.service.set(service);
    }

    fn get(&self) -> Result<&Service, ApiError> {
        self.service.get().ok_or(ApiError::Unavailable)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Unavailable => StatusCode::SERVICE_UNAVAILABLE,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/recommend", post(recommend))
        .route("/api/v1/jobs/{id}", get(job))
        .route("/api/v1/health", get(health))
        .route("/api/v1/stats", get(stats))
        .route("/api/v1/config", get(config))
        .fallback(|| async { ApiError::NotFound("no such route".into()) })
        .with_state(state)
}

async fn recommend(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    state.get()?;
    let req: RecommendRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::BadRequest(format!("invalid request body: {e}")))?;
    let task = tokio::task::spawn_blocking(move || {
        let svc = state.get()?;
        api::recommend(&svc.engine, svc.scorer.as_ref(), &svc.defaults, &req)
    });
    let resp = task
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(resp).into_response())
}

async fn job(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let svc = state.get()?;
    let n: u64 = id
        .parse()
        .map_err(|_| ApiError::BadRequest(format!("posting id `{id}` is not a number")))?;
    let posting = u32::try_from(n)
        .ok()
        .and_then(|n| svc.engine.corpus().get(PostingId(n)))
        .ok_or_else(|| ApiError::NotFound(format!("no posting with id {n}")))?;
    Ok(Json(posting).into_response())
}

async fn health(State(state): State<AppState>) -> Response {
    match state.get() {
        Ok(svc) => Json(json!({
            "status": "ok",
            "corpus_size": svc.engine.corpus().len(),
            "embedder_name": svc.engine.embedder().name(),
        }))
        .into_response(),
        Err(_) => (
            StatusCode::SERVICE_UNAVAILABLE,
            Json(json!({ "status": "loading" })),
        )
            .into_response(),
    }
}

async fn stats(State(state): State<AppState>) -> Result<Json<Value>, ApiError> {
    let svc = state.get()?;
    let e = &svc.engine;
    Ok(Json(json!({
        "corpus_size": e.corpus().len(),
        "vocabulary_size": e.sparse().vocabulary().len(),
        "sparse_entries": e.sparse().nnz(),
        "embedding_dimension": e.dense().dimension(),
        "embedder_name": e.embedder().name(),
        "pair_scorer": svc.scorer.name(),
        "artifacts_created_at": svc.manifest.as_ref().map(|m| m.created_at.clone()),
        "config_defaults": RankerConfig::default(),
    })))
}

async fn config(State(state): State<AppState>) -> Result<Json<RankerConfig>, ApiError> {
    Ok(Json(state.get()?.defaults.clone()))
}

pub struct ServeOptions {
    pub artifacts: PathBuf,
    pub addr: SocketAddr,
    pub rerank_url: Option<String>,
}

pub fn pair_scorer(rerank_url: Option<&str>) -> Result<Box<dyn PairScorer>, String> {
    match rerank_url {
        Some(url) => Ok(Box::new(
            mjobs_core::ranker::HttpPairScorer::new(url).map_err(|e| e.to_string())?,
        )),
        None => Ok(Box::new(mjobs_core::ranker::JaccardPairScorer)),
    }
}

/// Binds, loads artifacts in the background and serves until Ctrl-C,
/// letting in-flight requests finish.
pub async fn serve(opts: ServeOptions) -> Result<(), String> {
    let scorer = pair_scorer(opts.rerank_url.as_deref())?;
    let listener = tokio::net::TcpListener::bind(opts.addr)
        .await
        .map_err(|e| format!("cannot bind {}: {e}", opts.addr))?;
    let state = AppState::default();
    let loading = {
        let state = state.clone();
        let dir = opts.artifacts.clone();
        tokio::task::spawn_blocking(move || {
            let (engine, manifest) = artifacts::open_engine(&dir).map_err(|e| e.to_string())?;
            tracing::info!(
                records = engine.corpus().len(),
                embedder = engine.embedder().name(),
                "artifacts loaded"
            );
            let defaults = manifest.ranker.clone();
            state.install(Service {
                engine,
                manifest: Some(manifest),
                scorer,
                defaults,
            });
            Ok::<(), String>(())
        })
    };
    tracing::info!(addr = %opts.addr, "listening");
    let server = axum::serve(listener, router(state)).with_graceful_shutdown(async {
        let _ = tokio::signal::ctrl_c().await;
        tracing::info!("shutting down");
    });
    let server = tokio::spawn(async move { server.await });
    match loading.await {
        Ok(Ok(())) => {}
        Ok(Err(e)) => {
            server.abort();
            return Err(e);
        }
        Err(e) => {
            server.abort();
            return Err(e.to_string());
        }
    }
    server
        .await
        .map_err(|e| e.to_string())?
        .map_err(|e| e.to_string())
}
