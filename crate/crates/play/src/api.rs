//! HTTP routes over a [`Store`].

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use lowrand::formats::game_to_value;
use lowrand::game::example_games;
use lowrand::Rational;

use crate::session::{CreateRequest, HumanAction, PlayError, SessionView, StageResult};
use crate::store::Store;

pub struct ApiError(StatusCode, String);

impl From<PlayError> for ApiError {
    fn from(e: PlayError) -> Self {
        let status = match e {
            PlayError::UnknownSession => StatusCode::NOT_FOUND,
            PlayError::SessionComplete => StatusCode::CONFLICT,
            PlayError::Journal(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError(StatusCode::BAD_REQUEST, e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

#[derive(Deserialize)]
struct MoveRequest {
    action: HumanAction,
}

type Shared = State<Arc<Store>>;

async fn games() -> Json<Value> {
    let list: Vec<Value> = example_games::<Rational>().iter().map(game_to_value).collect();
    Json(Value::Array(list))
}

async fn create(State(store): Shared, body: Result<Json<CreateRequest>, JsonRejection>) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let Json(req) = body?;
    Ok((StatusCode::CREATED, Json(store.create(req)?)))
}

async fn submit(
    State(store): Shared,
    Path(id): Path<String>,
    body: Result<Json<MoveRequest>, JsonRejection>,
) -> Result<Json<StageResult>, ApiError> {
    let Json(m) = body?;
    Ok(Json(store.submit(&id, &m.action)?))
}

async fn state(State(store): Shared, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    Ok(Json(store.state(&id)?))
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/api/games", get(games))
        .route("/api/session", post(create))
        .route("/api/session/{id}", get(state))
        .route("/api/session/{id}/move", post(submit))
        .with_state(store)
}
