//! JSON-over-HTTP session service.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use polygame_core::Error;
use serde::Serialize;

use crate::session::{CreateSession, PostMove, SessionError, Store};

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub error: &'static str,
    pub message: String,
}

pub struct ApiError(StatusCode, ErrorBody);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let message = e.to_string();
        let (status, kind) = match &e {
            SessionError::UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            SessionError::NotYourTurn(_) => (StatusCode::CONFLICT, "not_your_turn"),
            SessionError::Finished => (StatusCode::CONFLICT, "finished"),
            SessionError::Game(Error::IllegalMove(_)) => (StatusCode::UNPROCESSABLE_ENTITY, "illegal_move"),
            SessionError::Game(Error::GameOver) => (StatusCode::CONFLICT, "finished"),
            SessionError::Game(Error::ResourceLimit(_)) => (StatusCode::BAD_REQUEST, "resource_limit"),
            SessionError::Game(Error::Parse(_)) => (StatusCode::BAD_REQUEST, "parse"),
            SessionError::Game(Error::OutOfScope(_)) => (StatusCode::BAD_REQUEST, "out_of_scope"),
            SessionError::Game(Error::NotApplicable(_) | Error::RoleLoses(_)) => {
                (StatusCode::BAD_REQUEST, "not_applicable")
            }
            SessionError::Game(_) => (StatusCode::BAD_REQUEST, "invalid"),
        };
        ApiError(status, ErrorBody { error: kind, message })
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError(StatusCode::BAD_REQUEST, ErrorBody { error: "bad_request", message: e.body_text() })
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

async fn create(State(store): State<Arc<Store>>, body: Result<Json<CreateSession>, JsonRejection>) -> ApiResult {
    let Json(req) = body?;
    let view = tokio::task::spawn_blocking(move || store.create(req)).await.expect("session task")?;
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn state(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult {
    Ok(Json(store.view(&id)?).into_response())
}

async fn post_move(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    body: Result<Json<PostMove>, JsonRejection>,
) -> ApiResult {
    let Json(mv) = body?;
    let view = tokio::task::spawn_blocking(move || store.post_move(&id, &mv)).await.expect("session task")?;
    Ok(Json(view).into_response())
}

async fn healthz() -> &'static str {
    "ok"
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(state))
        .route("/sessions/{id}/moves", post(post_move))
        .route("/healthz", get(healthz))
        .with_state(store)
}

pub async fn serve(store: Arc<Store>, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    axum::serve(listener, router(store)).await
}
