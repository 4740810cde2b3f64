use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;

use preplay_api::{ApiError, ErrorKind};
use preplay_core::bargaining::BargainError;
use preplay_core::game::ValidationReport;
use preplay_core::png::PngError;

#[derive(Debug)]
pub struct AppError(pub ApiError);

impl AppError {
    pub fn new(kind: ErrorKind, error: impl Into<String>) -> Self {
        AppError(ApiError {
            kind,
            error: error.into(),
            legal_moves: None,
        })
    }

    pub fn invalid(error: impl Into<String>) -> Self {
        AppError::new(ErrorKind::Invalid, error)
    }

    pub fn illegal(error: impl Into<String>, legal_moves: Vec<String>) -> Self {
        AppError(ApiError {
            kind: ErrorKind::IllegalMove,
            error: error.into(),
            legal_moves: Some(legal_moves),
        })
    }
}

impl IntoResponse for AppError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.0.kind.status()).expect("known status codes");
        (status, Json(self.0)).into_response()
    }
}

impl From<ValidationReport> for AppError {
    fn from(r: ValidationReport) -> Self {
        AppError::invalid(r.to_string())
    }
}

impl From<BargainError> for AppError {
    fn from(e: BargainError) -> Self {
        AppError::invalid(e.to_string())
    }
}

impl From<PngError> for AppError {
    fn from(e: PngError) -> Self {
        match e {
            PngError::Budget(_) => AppError::new(ErrorKind::Analysis, e.to_string()),
            _ => AppError::invalid(e.to_string()),
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
