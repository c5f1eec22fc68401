use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, FromRequest, FromRequestParts, Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use lexigraph_api::*;
use lexigraph_core::learner_model::LearnerModel;
use serde::Deserialize;

use crate::error::AppError;
use crate::state::AppState;

type AppResult<T> = Result<Json<T>, AppError>;
type Shared = State<Arc<AppState>>;

/// `axum::Json` with errors rendered as [`ApiError`].
#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(AppError))]
pub struct ApiJson<T>(pub T);

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Query), rejection(AppError))]
pub struct ApiQuery<T>(pub T);

#[derive(Deserialize)]
pub struct ViewQuery {
    pub expand: Option<FamilyId>,
}

pub fn router(state: Arc<AppState>) -> Router {
    let limit = state.config.max_upload_bytes;
    let mut router = Router::new()
        .route("/books", post(upload_book))
        .route("/books/{book}/status", get(book_status))
        .route("/books/{book}/graph", get(book_graph))
        .route("/learners/{learner}/books/{book}/warmstart", post(start_warmstart))
        .route(
            "/learners/{learner}/books/{book}/warmstart/answers",
            post(submit_warmstart),
        )
        .route("/learners/{learner}/books/{book}/sessions", post(start_session))
        .route("/learners/{learner}/books/{book}/view", get(learner_view))
        .route("/learners/{learner}/books/{book}/model", get(learner_model))
        .route("/sessions/{session}/next", get(next_activity))
        .route("/sessions/{session}/answers", post(submit_answer));
    if state.config.expose_answer_oracle {
        router = router.route("/sessions/{session}/oracle", get(oracle));
    }
    router
        .fallback(|| async { AppError::NotFound("route".into()) })
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

async fn upload_book(
    State(state): Shared,
    ApiJson(upload): ApiJson<UploadBook>,
) -> Result<(StatusCode, Json<UploadAccepted>), AppError> {
    let (new, accepted) = state.upload(upload)?;
    let status = if new { StatusCode::ACCEPTED } else { StatusCode::OK };
    Ok((status, Json(accepted)))
}

async fn book_status(State(state): Shared, Path(book): Path<String>) -> AppResult<BookStatusResponse> {
    state.status(&book).map(Json)
}

async fn book_graph(State(state): Shared, Path(book): Path<String>) -> AppResult<GraphExport> {
    Ok(Json(state.ready_book(&book)?.export.clone()))
}

async fn start_warmstart(
    State(state): Shared,
    Path((learner, book)): Path<(String, String)>,
    body: Bytes,
) -> AppResult<WarmstartChecklist> {
    // the body is optional
    let req = if body.iter().all(u8::is_ascii_whitespace) {
        WarmstartRequest::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| AppError::BadRequest(format!("invalid warm-start request: {e}")))?
    };
    state.start_warmstart(&learner, &book, req).await.map(Json)
}

async fn submit_warmstart(
    State(state): Shared,
    Path((learner, book)): Path<(String, String)>,
    ApiJson(answers): ApiJson<WarmstartAnswers>,
) -> AppResult<WarmstartResult> {
    state.submit_warmstart(&learner, &book, answers).await.map(Json)
}

async fn start_session(
    State(state): Shared,
    Path((learner, book)): Path<(String, String)>,
    ApiJson(req): ApiJson<StartSession>,
) -> Result<(StatusCode, Json<SessionInfo>), AppError> {
    let info = state.start_session(&learner, &book, req).await?;
    Ok((StatusCode::CREATED, Json(info)))
}

async fn learner_view(
    State(state): Shared,
    Path((learner, book)): Path<(String, String)>,
    ApiQuery(q): ApiQuery<ViewQuery>,
) -> AppResult<LearnerView> {
    state.learner_view(&learner, &book, q.expand).await.map(Json)
}

async fn learner_model(State(state): Shared, Path((learner, book)): Path<(String, String)>) -> AppResult<LearnerModel> {
    state.learner_model(&learner, &book).await.map(Json)
}

async fn next_activity(State(state): Shared, Path(session): Path<String>) -> AppResult<NextActivity> {
    state.next_activity(&session).await.map(Json)
}

async fn submit_answer(
    State(state): Shared,
    Path(session): Path<String>,
    ApiJson(answer): ApiJson<SubmitAnswer>,
) -> AppResult<AnswerResult> {
    state.submit_answer(&session, answer).await.map(Json)
}

async fn oracle(State(state): Shared, Path(session): Path<String>) -> AppResult<OracleAnswer> {
    state.oracle(&session).await.map(Json)
}
