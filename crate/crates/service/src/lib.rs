//! HTTP/JSON front end for the negotiation engine.

pub mod analysis;
pub mod error;
pub mod session;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use preplay_api::*;
use preplay_core::transcript::Transcript;
use tokio::net::TcpListener;
use tokio::sync::{Mutex, RwLock};

use error::{AppError, AppResult};
use session::Session;

/// Defaults applied to sessions created without a game.
#[derive(Debug, Clone, Default)]
pub struct Defaults {
    pub game: Option<String>,
    pub rules: Rules,
}

#[derive(Debug, Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    defaults: Defaults,
}

impl AppState {
    pub fn new(defaults: Defaults) -> Arc<Self> {
        Arc::new(AppState {
            defaults,
            ..AppState::default()
        })
    }

    async fn session(&self, id: &str) -> AppResult<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| AppError::new(ErrorKind::NotFound, format!("no session `{id}`")))
    }
}

type Shared = Arc<AppState>;

pub fn app(state: Shared) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/solve", post(solve))
        .route("/transform", post(transform))
        .route("/best-offer", post(best_offer))
        .route("/negotiate", post(negotiate))
        .route("/bargain", post(bargain))
        .route("/verify-spe", post(verify_spe))
        .route("/replay", post(replay))
        .route("/gen", post(generate))
        .route("/session", post(create_session))
        .route("/session/{id}", get(get_session))
        .route("/session/{id}/move", post(make_move))
        .route("/session/{id}/log", get(session_log))
        .route("/session/{id}/analyze", post(analyze))
        .with_state(state)
}

pub async fn serve(listener: TcpListener, state: Shared) -> std::io::Result<()> {
    tracing::info!(addr = ?listener.local_addr().ok(), "serving");
    axum::serve(listener, app(state)).await
}

/// Runs an analysis on the blocking pool.
async fn blocking<T, R>(req: R, f: fn(&R) -> AppResult<T>) -> AppResult<Json<T>>
where
    T: Send + 'static,
    R: Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&req))
        .await
        .map_err(|e| AppError::new(ErrorKind::Analysis, format!("analysis aborted: {e}")))?
        .map(Json)
}

async fn solve(Json(req): Json<SolveRequest>) -> AppResult<Json<SolveReport>> {
    blocking(req, analysis::solve).await
}

async fn transform(Json(req): Json<TransformRequest>) -> AppResult<Json<TransformReport>> {
    blocking(req, analysis::transform).await
}

async fn best_offer(Json(req): Json<BestOfferRequest>) -> AppResult<Json<BestOfferReport>> {
    blocking(req, analysis::best_offer_report).await
}

async fn negotiate(Json(req): Json<NegotiateRequest>) -> AppResult<Json<NegotiateReport>> {
    blocking(req, analysis::negotiate).await
}

async fn bargain(Json(req): Json<BargainRequest>) -> AppResult<Json<BargainReport>> {
    blocking(req, analysis::bargain).await
}

async fn verify_spe(Json(req): Json<VerifyRequest>) -> AppResult<Json<VerifyReport>> {
    blocking(req, analysis::verify).await
}

async fn replay(Json(req): Json<ReplayRequest>) -> AppResult<Json<ReplayReport>> {
    blocking(req, analysis::replay_report).await
}

async fn generate(Json(req): Json<GenRequest>) -> AppResult<Json<GenReport>> {
    blocking(req, analysis::generate).await
}

async fn create_session(
    State(state): State<Shared>,
    Json(req): Json<CreateSession>,
) -> AppResult<(StatusCode, Json<MoveResponse>)> {
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::Relaxed) + 1);
    let defaults = state.defaults.clone();
    let (session, engine_moves) = tokio::task::spawn_blocking(move || {
        Session::create(id, &req, defaults.game.as_deref(), &defaults.rules)
    })
    .await
    .map_err(|e| AppError::new(ErrorKind::Analysis, format!("session setup aborted: {e}")))??;
    let response = MoveResponse {
        state: session.state()?,
        engine_moves,
        hints: None,
    };
    state
        .sessions
        .write()
        .await
        .insert(session.id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(response)))
}

async fn get_session(State(state): State<Shared>, Path(id): Path<String>) -> AppResult<Json<SessionState>> {
    let s = state.session(&id).await?;
    let s = s.lock().await;
    Ok(Json(s.state()?))
}

async fn session_log(State(state): State<Shared>, Path(id): Path<String>) -> AppResult<Json<Transcript>> {
    let s = state.session(&id).await?;
    let s = s.lock().await;
    Ok(Json(s.transcript()))
}

async fn make_move(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Json(req): Json<MoveRequest>,
) -> AppResult<Json<MoveResponse>> {
    let s = state.session(&id).await?;
    // A second move racing the first is refused rather than queued.
    let mut guard = s
        .try_lock_owned()
        .map_err(|_| AppError::new(ErrorKind::Conflict, "another move is being processed"))?;
    tokio::task::spawn_blocking(move || guard.play(&req))
        .await
        .map_err(|e| AppError::new(ErrorKind::Analysis, format!("move aborted: {e}")))?
        .map(Json)
}

async fn analyze(State(state): State<Shared>, Path(id): Path<String>) -> AppResult<Json<Hints>> {
    let s = state.session(&id).await?;
    let guard = s.lock_owned().await;
    tokio::task::spawn_blocking(move || guard.hints())
        .await
        .map_err(|e| AppError::new(ErrorKind::Analysis, format!("analysis aborted: {e}")))?
        .map(Json)
}
