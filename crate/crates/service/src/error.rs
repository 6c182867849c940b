use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use evc_core::game::RoundRecord;
use evc_core::EvcError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Game(#[from] EvcError),

    #[error("unknown session {0}")]
    UnknownSession(String),

    #[error("session is at version {current}, request expected {expected}")]
    Conflict { expected: u64, current: u64 },

    #[error("bad request: {0}")]
    BadRequest(String),

    #[error("session log: {0}")]
    Storage(String),
}

impl From<std::io::Error> for ServiceError {
    fn from(e: std::io::Error) -> Self {
        ServiceError::Storage(e.to_string())
    }
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Game(e) => match e {
                EvcError::IllegalAttack(_) | EvcError::UnknownVertex(_) => "IllegalAttack",
                EvcError::Indefensible(_) => "Indefensible",
                EvcError::CoverBroken(..) => "CoverBroken",
                EvcError::IllegalMove(_) => "IllegalMove",
                EvcError::NotApplicable(_) => "NotApplicable",
                EvcError::DegenerateParameters(_) => "DegenerateParameters",
                _ => "GameError",
            },
            ServiceError::UnknownSession(_) => "UnknownSession",
            ServiceError::Conflict { .. } => "Conflict",
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::Storage(_) => "Storage",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::Game(EvcError::IllegalAttack(_) | EvcError::UnknownVertex(_)) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Game(EvcError::NotApplicable(_) | EvcError::DegenerateParameters(_)) => StatusCode::BAD_REQUEST,
            ServiceError::Game(_) | ServiceError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict { .. } => StatusCode::CONFLICT,
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
        }
    }
}

/// Error body. Strategy failures carry the rounds played before them.
#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<RoundRecord>>,
}

/// A [`ServiceError`] with an optional trace attached.
pub struct ApiError {
    pub error: ServiceError,
    pub trace: Option<Vec<RoundRecord>>,
}

impl From<ServiceError> for ApiError {
    fn from(error: ServiceError) -> Self {
        ApiError { error, trace: None }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody { error: self.error.code(), message: self.error.to_string(), trace: self.trace };
        (self.error.status(), Json(body)).into_response()
    }
}
