//! Typed client for the preplay HTTP service.

use preplay_api::*;
use preplay_core::transcript::Transcript;
use reqwest::{Method, StatusCode};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    /// The service answered with a structured error.
    #[error("{}", .error.error)]
    Api { status: u16, error: ApiError },
    #[error("unexpected reply ({status}): {body}")]
    Unexpected { status: u16, body: String },
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
}

impl ClientError {
    pub fn kind(&self) -> Option<ErrorKind> {
        match self {
            ClientError::Api { error, .. } => Some(error.kind),
            _ => None,
        }
    }
}

pub type ClientResult<T> = Result<T, ClientError>;

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Client {
            base: base.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    async fn send<B: Serialize, T: DeserializeOwned>(&self, method: Method, path: &str, body: Option<&B>) -> ClientResult<T> {
        let mut req = self.http.request(method, format!("{}{path}", self.base));
        if let Some(b) = body {
            req = req.json(b);
        }
        let resp = req.send().await?;
        let status = resp.status();
        if status.is_success() {
            return Ok(resp.json().await?);
        }
        let text = resp.text().await?;
        Err(match serde_json::from_str::<ApiError>(&text) {
            Ok(error) => ClientError::Api { status: status.as_u16(), error },
            Err(_) => ClientError::Unexpected { status: status.as_u16(), body: text },
        })
    }

    async fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> ClientResult<T> {
        self.send(Method::POST, path, Some(body)).await
    }

    async fn get<T: DeserializeOwned>(&self, path: &str) -> ClientResult<T> {
        self.send::<(), T>(Method::GET, path, None).await
    }

    pub async fn health(&self) -> ClientResult<bool> {
        let resp = self.http.get(format!("{}/health", self.base)).send().await?;
        Ok(resp.status() == StatusCode::OK)
    }

    pub async fn solve(&self, req: &SolveRequest) -> ClientResult<SolveReport> {
        self.post("/solve", req).await
    }

    pub async fn transform(&self, req: &TransformRequest) -> ClientResult<TransformReport> {
        self.post("/transform", req).await
    }

    pub async fn best_offer(&self, req: &BestOfferRequest) -> ClientResult<BestOfferReport> {
        self.post("/best-offer", req).await
    }

    pub async fn negotiate(&self, req: &NegotiateRequest) -> ClientResult<NegotiateReport> {
        self.post("/negotiate", req).await
    }

    pub async fn bargain(&self, req: &BargainRequest) -> ClientResult<BargainReport> {
        self.post("/bargain", req).await
    }

    pub async fn verify_spe(&self, req: &VerifyRequest) -> ClientResult<VerifyReport> {
        self.post("/verify-spe", req).await
    }

    pub async fn replay(&self, req: &ReplayRequest) -> ClientResult<ReplayReport> {
        self.post("/replay", req).await
    }

    pub async fn generate(&self, req: &GenRequest) -> ClientResult<GenReport> {
        self.post("/gen", req).await
    }

    pub async fn create_session(&self, req: &CreateSession) -> ClientResult<MoveResponse> {
        self.post("/session", req).await
    }

    pub async fn session(&self, id: &str) -> ClientResult<SessionState> {
        self.get(&format!("/session/{id}")).await
    }

    pub async fn play(&self, id: &str, req: &MoveRequest) -> ClientResult<MoveResponse> {
        self.post(&format!("/session/{id}/move"), req).await
    }

    pub async fn session_log(&self, id: &str) -> ClientResult<Transcript> {
        self.get(&format!("/session/{id}/log")).await
    }

    pub async fn analyze(&self, id: &str) -> ClientResult<Hints> {
        self.send::<(), Hints>(Method::POST, &format!("/session/{id}/analyze"), None).await
    }
}
