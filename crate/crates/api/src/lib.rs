//! Request and response bodies of the lexigraph HTTP API.
//!
//! Every type derives `JsonSchema`; [`schemas`] lists the top-level payloads
//! and the files under `schemas/` are generated from it.

use schemars::{JsonSchema, Schema};
use serde::{Deserialize, Serialize};

pub use lexigraph_core::activities::{ActivityView, Aid, Mode};
pub use lexigraph_core::learner_model::{Band, Color, LearnerModel};
pub use lexigraph_core::morphology::FamilyId;
pub use lexigraph_core::pipeline::BuildStats;
pub use lexigraph_core::semantics::{ExportEdge, ExportMember, GraphExport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum BookFormat {
    /// Plain UTF-8 text, tokenized and tagged server-side.
    Text,
    /// `surface<TAB>lemma<TAB>POS` lines, blank line between sentences.
    Pretagged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct UploadBook {
    pub title: String,
    pub format: BookFormat,
    pub content: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum BookStatus {
    Ingesting,
    Building,
    Ready,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct UploadAccepted {
    pub book_id: String,
    pub status: BookStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct BookStatusResponse {
    pub book_id: String,
    pub title: String,
    pub status: BookStatus,
    /// Set when the build failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<BuildStats>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WarmstartRequest {
    /// Defaults to the configured warm-start size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ChecklistWord {
    pub family: FamilyId,
    pub word: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WarmstartChecklist {
    pub learner_id: String,
    pub book_id: String,
    pub words: Vec<ChecklistWord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WarmstartAnswer {
    pub family: FamilyId,
    pub known: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WarmstartAnswers {
    pub answers: Vec<WarmstartAnswer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ChangedNode {
    pub family: FamilyId,
    pub old: f64,
    pub new: f64,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ModelSummary {
    pub learner_id: String,
    pub book_id: String,
    pub nodes: usize,
    pub touched: usize,
    /// Nodes with mastery strictly above 0.5.
    pub above_half: usize,
    pub log_length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WarmstartResult {
    pub summary: ModelSummary,
    pub changed: Vec<ChangedNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct StartSession {
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SessionInfo {
    pub session_id: String,
    pub learner_id: String,
    pub book_id: String,
    pub mode: Mode,
    /// Number of planned activities.
    pub length: usize,
    pub cursor: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WordResult {
    pub activity_id: String,
    pub answer: String,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SessionSummary {
    pub session_id: String,
    pub mode: Mode,
    pub answered: usize,
    pub correct: usize,
    pub results: Vec<WordResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum NextActivity {
    Activity { activity: ActivityView },
    Complete { summary: SessionSummary },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SubmitAnswer {
    pub activity_id: String,
    pub chosen: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AnswerResult {
    pub activity_id: String,
    pub correct: bool,
    /// The correct option, revealed once answered.
    pub answer: String,
    pub mode: Mode,
    /// Every node whose mastery changed; empty in learning mode.
    pub changed: Vec<ChangedNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ViewNode {
    pub id: FamilyId,
    pub representative: String,
    pub mastery: f64,
    pub touched: bool,
    pub color: Color,
    /// Planned for the learner's next session.
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ExpandedFamily {
    pub id: FamilyId,
    pub representative: String,
    pub members: Vec<ExportMember>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct LearnerView {
    pub learner_id: String,
    pub book_id: String,
    pub nodes: Vec<ViewNode>,
    pub edges: Vec<ExportEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expanded: Option<ExpandedFamily>,
}

/// Test-only: the answer to a served activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct OracleAnswer {
    pub activity_id: String,
    pub answer: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadRequest,
    NotFound,
    NotReady,
    PayloadTooLarge,
    AlreadyAnswered,
    InvalidChoice,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ApiError {
    pub code: ErrorCode,
    pub error: String,
}

/// Top-level payloads by schema file stem.
pub fn schemas() -> Vec<(&'static str, Schema)> {
    use schemars::schema_for;
    vec![
        ("upload_book", schema_for!(UploadBook)),
        ("upload_accepted", schema_for!(UploadAccepted)),
        ("book_status", schema_for!(BookStatusResponse)),
        ("graph_export", schema_for!(GraphExport)),
        ("warmstart_request", schema_for!(WarmstartRequest)),
        ("warmstart_checklist", schema_for!(WarmstartChecklist)),
        ("warmstart_answers", schema_for!(WarmstartAnswers)),
        ("warmstart_result", schema_for!(WarmstartResult)),
        ("start_session", schema_for!(StartSession)),
        ("session_info", schema_for!(SessionInfo)),
        ("next_activity", schema_for!(NextActivity)),
        ("submit_answer", schema_for!(SubmitAnswer)),
        ("answer_result", schema_for!(AnswerResult)),
        ("learner_view", schema_for!(LearnerView)),
        ("learner_model", schema_for!(LearnerModel)),
        ("oracle_answer", schema_for!(OracleAnswer)),
        ("api_error", schema_for!(ApiError)),
    ]
}

/// Looks up one schema from [`schemas`].
pub fn schema(name: &str) -> Option<Schema> {
    schemas().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}

/// Pretty JSON as written to `schemas/<name>.json`.
pub fn render_schema(schema: &Schema) -> String {
    let mut text = serde_json::to_string_pretty(schema).expect("schemas serialize");
    text.push('\n');
    text
}
