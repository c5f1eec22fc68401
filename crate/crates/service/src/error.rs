use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use lexigraph_api::{ApiError, ErrorCode};
use lexigraph_core::error::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0} not found")]
    NotFound(String),
    #[error("book {0} is not ready")]
    NotReady(String),
    #[error("{0}")]
    PayloadTooLarge(String),
    #[error("activity {0} was already answered")]
    AlreadyAnswered(String),
    #[error("{0}")]
    InvalidChoice(String),
    #[error("{0}")]
    Internal(String),
}

impl AppError {
    fn parts(&self) -> (StatusCode, ErrorCode) {
        match self {
            AppError::BadRequest(_) => (StatusCode::BAD_REQUEST, ErrorCode::BadRequest),
            AppError::NotFound(_) => (StatusCode::NOT_FOUND, ErrorCode::NotFound),
            AppError::NotReady(_) => (StatusCode::CONFLICT, ErrorCode::NotReady),
            AppError::PayloadTooLarge(_) => (StatusCode::PAYLOAD_TOO_LARGE, ErrorCode::PayloadTooLarge),
            AppError::AlreadyAnswered(_) => (StatusCode::CONFLICT, ErrorCode::AlreadyAnswered),
            AppError::InvalidChoice(_) => (StatusCode::UNPROCESSABLE_ENTITY, ErrorCode::InvalidChoice),
            AppError::Internal(_) => (StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal),
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::UnknownNode(id) => AppError::NotFound(format!("family {id}")),
            CoreError::InvalidChoice(_) => AppError::InvalidChoice(e.to_string()),
            CoreError::InvalidParameter(_) | CoreError::Parse { .. } | CoreError::EmptyText => {
                AppError::BadRequest(e.to_string())
            }
            other => AppError::Internal(other.to_string()),
        }
    }
}

impl From<JsonRejection> for AppError {
    fn from(r: JsonRejection) -> Self {
        if r.status() == StatusCode::PAYLOAD_TOO_LARGE {
            AppError::PayloadTooLarge(r.body_text())
        } else {
            AppError::BadRequest(r.body_text())
        }
    }
}

impl From<QueryRejection> for AppError {
    fn from(r: QueryRejection) -> Self {
        AppError::BadRequest(r.body_text())
    }
}

impl IntoResponse for AppError {
    fn into_response(self) -> Response {
        let (status, code) = self.parts();
        if status.is_server_error() {
            tracing::error!("{self}");
        }
        let body = ApiError {
            code,
            error: self.to_string(),
        };
        (status, Json(body)).into_response()
    }
}
