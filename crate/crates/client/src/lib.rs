//! Async client for the lexigraph HTTP API.

use lexigraph_api::*;
use reqwest::{Method, RequestBuilder, StatusCode};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub use lexigraph_api as api;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error(transparent)]
    Http(#[from] reqwest::Error),
    #[error("{status}: {}", error.error)]
    Api { status: StatusCode, error: ApiError },
}

impl ClientError {
    /// The API error code, when the server answered with one.
    pub fn code(&self) -> Option<ErrorCode> {
        match self {
            ClientError::Api { error, .. } => Some(error.code),
            ClientError::Http(_) => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, ClientError>;

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the server root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Client {
            base: base.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    fn request(&self, method: Method, path: &str) -> RequestBuilder {
        self.http.request(method, format!("{}{path}", self.base))
    }

    async fn send<T: DeserializeOwned>(&self, req: RequestBuilder) -> Result<T> {
        let resp = req.send().await?;
        let status = resp.status();
        if status.is_success() {
            return Ok(resp.json().await?);
        }
        let text = resp.text().await?;
        let error = serde_json::from_str(&text).unwrap_or(ApiError {
            code: ErrorCode::Internal,
            error: text,
        });
        Err(ClientError::Api { status, error })
    }

    async fn get<T: DeserializeOwned>(&self, path: &str) -> Result<T> {
        self.send(self.request(Method::GET, path)).await
    }

    async fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> Result<T> {
        self.send(self.request(Method::POST, path).json(body)).await
    }

    pub async fn upload_book(&self, upload: &UploadBook) -> Result<UploadAccepted> {
        self.post("/books", upload).await
    }

    pub async fn book_status(&self, book: &str) -> Result<BookStatusResponse> {
        self.get(&format!("/books/{book}/status")).await
    }

    /// Polls the status every `interval` until the build finishes.
    pub async fn wait_for_book(&self, book: &str, interval: std::time::Duration) -> Result<BookStatusResponse> {
        loop {
            let status = self.book_status(book).await?;
            if matches!(status.status, BookStatus::Ready | BookStatus::Failed) {
                return Ok(status);
            }
            tokio::time::sleep(interval).await;
        }
    }

    pub async fn book_graph(&self, book: &str) -> Result<GraphExport> {
        self.get(&format!("/books/{book}/graph")).await
    }

    pub async fn start_warmstart(
        &self,
        learner: &str,
        book: &str,
        test_size: Option<usize>,
    ) -> Result<WarmstartChecklist> {
        let body = WarmstartRequest { test_size };
        self.post(&format!("/learners/{learner}/books/{book}/warmstart"), &body)
            .await
    }

    pub async fn submit_warmstart(
        &self,
        learner: &str,
        book: &str,
        answers: &WarmstartAnswers,
    ) -> Result<WarmstartResult> {
        self.post(&format!("/learners/{learner}/books/{book}/warmstart/answers"), answers)
            .await
    }

    pub async fn start_session(&self, learner: &str, book: &str, mode: Mode) -> Result<SessionInfo> {
        self.post(
            &format!("/learners/{learner}/books/{book}/sessions"),
            &StartSession { mode },
        )
        .await
    }

    pub async fn next_activity(&self, session: &str) -> Result<NextActivity> {
        self.get(&format!("/sessions/{session}/next")).await
    }

    pub async fn submit_answer(&self, session: &str, activity_id: &str, chosen: &str) -> Result<AnswerResult> {
        let body = SubmitAnswer {
            activity_id: activity_id.to_string(),
            chosen: chosen.to_string(),
        };
        self.post(&format!("/sessions/{session}/answers"), &body).await
    }

    /// Only served when the server runs with `expose_answer_oracle`.
    pub async fn oracle(&self, session: &str) -> Result<OracleAnswer> {
        self.get(&format!("/sessions/{session}/oracle")).await
    }

    pub async fn learner_view(&self, learner: &str, book: &str, expand: Option<FamilyId>) -> Result<LearnerView> {
        let mut req = self.request(Method::GET, &format!("/learners/{learner}/books/{book}/view"));
        if let Some(f) = expand {
            req = req.query(&[("expand", f.0)]);
        }
        self.send(req).await
    }

    pub async fn learner_model(&self, learner: &str, book: &str) -> Result<LearnerModel> {
        self.get(&format!("/learners/{learner}/books/{book}/model")).await
    }
}
