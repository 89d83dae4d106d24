use axum::extract::rejection::JsonRejection;
use axum::extract::{FromRequest, Request};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use pedforge_core::WorkbenchError;

/// Body of every 4xx and 5xx response.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ApiError {
    pub fn validation(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            code: "VALIDATION",
            message: message.into(),
            detail: None,
        }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            code: "NOT_FOUND",
            message: message.into(),
            detail: None,
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "STORAGE_FAILURE",
            message: message.into(),
            detail: None,
        }
    }
}

pub fn status_for(code: &str) -> StatusCode {
    match code {
        "NOT_FOUND" => StatusCode::NOT_FOUND,
        "VALIDATION" => StatusCode::UNPROCESSABLE_ENTITY,
        "GATE_NOT_SATISFIED"
        | "NOT_ALIGNED"
        | "MAX_DEPTH"
        | "OUTDATED_ARTIFACT"
        | "INCOMPLETE_DOCUMENT"
        | "NO_ACCEPTED_CANDIDATE"
        | "NO_PEDAGOGY_SENTENCE" => StatusCode::CONFLICT,
        "PROVIDER_FAILURE" => StatusCode::BAD_GATEWAY,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl From<WorkbenchError> for ApiError {
    fn from(e: WorkbenchError) -> Self {
        let detail = match &e {
            WorkbenchError::NotAligned { stale, missing } => Some(json!({ "stale": stale, "missing": missing })),
            WorkbenchError::ProviderFailure {
                attempts,
                last_violation,
            } => Some(json!({ "attempts": attempts, "last_violation": last_violation })),
            WorkbenchError::IncompleteDocument(open) => Some(json!({ "open_fields": open })),
            WorkbenchError::MaxDepth(level) => Some(json!({ "level": level })),
            WorkbenchError::OutdatedArtifact(id) => Some(json!({ "artifact": id })),
            _ => None,
        };
        ApiError {
            status: status_for(e.code()),
            code: e.code(),
            message: e.to_string(),
            detail,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

/// JSON body extractor whose rejections are [`ApiError`]s.
pub struct ApiJson<T>(pub T);

impl<S, T> FromRequest<S> for ApiJson<T>
where
    T: DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(ApiJson(v)),
            Err(rejection) => Err(rejection_error(rejection)),
        }
    }
}

fn rejection_error(rejection: JsonRejection) -> ApiError {
    ApiError::validation(rejection.body_text())
}
