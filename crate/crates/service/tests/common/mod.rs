#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use lexigraph_api::{BookFormat, BookStatus, UploadBook};
use lexigraph_client::Client;
use lexigraph_service::{app, AppState, ServiceConfig};
use serde_json::Value;
use tokio::task::JoinHandle;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn config(data_dir: &std::path::Path) -> ServiceConfig {
    let mut c = ServiceConfig {
        data_dir: data_dir.to_path_buf(),
        bind: "127.0.0.1:0".parse().unwrap(),
        expose_answer_oracle: true,
        ..Default::default()
    };
    c.engine.embeddings = Some(fixtures().join("the-mystery.vectors.txt"));
    c
}

pub fn fixture_upload() -> UploadBook {
    UploadBook {
        title: "The Mystery".into(),
        format: BookFormat::Pretagged,
        content: std::fs::read_to_string(fixtures().join("the-mystery.tsv")).unwrap(),
    }
}

pub struct TestServer {
    pub client: Client,
    pub base: String,
    pub state: Arc<AppState>,
    handle: JoinHandle<()>,
}

impl TestServer {
    pub async fn start(config: ServiceConfig) -> Self {
        let (state, router) = app(config).await.unwrap();
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let handle = tokio::spawn(async move {
            axum::serve(listener, router).await.unwrap();
        });
        TestServer {
            client: Client::new(base.clone()),
            base,
            state,
            handle,
        }
    }

    pub async fn stop(self) {
        self.handle.abort();
        let _ = self.handle.await;
    }

    /// Uploads and waits for the build; panics unless it becomes ready.
    pub async fn ready_book(&self, upload: &UploadBook) -> String {
        let accepted = self.client.upload_book(upload).await.unwrap();
        let status = self
            .client
            .wait_for_book(&accepted.book_id, Duration::from_millis(50))
            .await
            .unwrap();
        assert_eq!(status.status, BookStatus::Ready, "{:?}", status.reason);
        accepted.book_id
    }

    /// Raw JSON of a GET, with its status code.
    pub async fn get_raw(&self, path: &str) -> (u16, Value) {
        let resp = reqwest::get(format!("{}{path}", self.base)).await.unwrap();
        (resp.status().as_u16(), resp.json().await.unwrap())
    }

    pub async fn post_raw(&self, path: &str, body: &Value) -> (u16, Value) {
        let resp = reqwest::Client::new()
            .post(format!("{}{path}", self.base))
            .json(body)
            .send()
            .await
            .unwrap();
        (resp.status().as_u16(), resp.json().await.unwrap())
    }
}

/// Panics with every violation when `value` does not match the shipped schema.
pub fn assert_schema(name: &str, value: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../api/schemas/{name}.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

/// Keys that must never reach a client before the answer is submitted.
pub fn assert_no_answer_keys(value: &Value) {
    let text = value.to_string();
    for key in [
        "answer_token",
        "target_family",
        "target_unit",
        "gap_answers",
        "option_units",
        "distractors",
    ] {
        assert!(!text.contains(&format!("\"{key}\"")), "payload leaks `{key}`: {text}");
    }
}
