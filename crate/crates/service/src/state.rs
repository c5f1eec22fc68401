//! Shared service state and the operations behind each endpoint.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, RwLock};

use lexigraph_api::*;
use lexigraph_core::activities::{generate_activity, grade, Activity};
use lexigraph_core::error::{Error as CoreError, Result as CoreResult};
use lexigraph_core::ingestion::{
    content_id, default_stopwords, load_stopwords, parse_pretagged, tokenize_and_tag, LexiconTagger,
};
use lexigraph_core::learner_model::{LearnerModel, NodeChange, UpdateKind};
use lexigraph_core::morphology::AffixTable;
use lexigraph_core::pipeline::{activity_settings, build_book, BookArtifacts};
use lexigraph_core::planner::{plan_session_where, plan_warmstart};
use lexigraph_core::EmbeddingTable;
use sha2::{Digest, Sha256};

use crate::config::ServiceConfig;
use crate::error::AppError;
use crate::store::{ArtifactRefs, BookRecord, BuildParams, Store};

type AppResult<T> = std::result::Result<T, AppError>;

/// A ready book with the per-book data the service derives at load time.
pub struct LoadedBook {
    pub artifacts: BookArtifacts,
    pub export: GraphExport,
    /// Families that can produce an activity (enough sentences and distractors).
    pub eligible: Vec<bool>,
}

impl LoadedBook {
    fn new(artifacts: BookArtifacts, config: &ServiceConfig) -> Self {
        let export = GraphExport::new(&artifacts.graph, &artifacts.families);
        let fresh = LearnerModel::new(&artifacts.graph, "", config.engine.update_params());
        let settings = activity_settings(&config.engine, &config.aids, 0);
        let eligible = artifacts
            .graph
            .nodes()
            .map(|f| generate_activity(&artifacts.book(), &fresh, f, Mode::Testing, &settings).is_ok())
            .collect();
        LoadedBook {
            artifacts,
            export,
            eligible,
        }
    }

    fn is_eligible(&self, family: FamilyId) -> bool {
        self.eligible.get(family.index()).copied().unwrap_or(false)
    }
}

struct BookEntry {
    record: BookRecord,
    loaded: Option<Arc<LoadedBook>>,
}

struct Session {
    id: String,
    mode: Mode,
    targets: Vec<FamilyId>,
    cursor: usize,
    seed: u64,
    /// Served and not yet answered.
    current: Option<Activity>,
    answered: HashSet<String>,
    results: Vec<WordResult>,
}

impl Session {
    fn info(&self, learner: &str, book: &str) -> SessionInfo {
        SessionInfo {
            session_id: self.id.clone(),
            learner_id: learner.to_string(),
            book_id: book.to_string(),
            mode: self.mode,
            length: self.targets.len(),
            cursor: self.cursor,
        }
    }

    fn summary(&self) -> SessionSummary {
        SessionSummary {
            session_id: self.id.clone(),
            mode: self.mode,
            answered: self.results.len(),
            correct: self.results.iter().filter(|r| r.correct).count(),
            results: self.results.clone(),
        }
    }
}

/// One learner on one book. Guarded by an async mutex so updates for a
/// learner are applied one at a time.
#[derive(Default)]
struct LearnerSlot {
    model: Option<LearnerModel>,
    session: Option<Session>,
}

type SlotKey = (String, String);

pub struct AppState {
    pub config: ServiceConfig,
    store: Store,
    stopwords: HashSet<String>,
    affixes: AffixTable,
    books: RwLock<HashMap<String, BookEntry>>,
    learners: Mutex<HashMap<SlotKey, Arc<tokio::sync::Mutex<LearnerSlot>>>>,
    sessions: Mutex<HashMap<String, SlotKey>>,
}

fn validate_learner(id: &str) -> AppResult<()> {
    let ok = (1..=64).contains(&id.len()) && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_');
    if ok {
        Ok(())
    } else {
        Err(AppError::BadRequest(format!("invalid learner id `{id}`")))
    }
}

fn changed_nodes(model: &LearnerModel, changes: impl IntoIterator<Item = NodeChange>) -> Vec<ChangedNode> {
    // first old and last new value per node
    let mut merged: BTreeMap<FamilyId, (f64, f64)> = BTreeMap::new();
    for c in changes {
        merged
            .entry(c.family)
            .and_modify(|e| e.1 = c.new)
            .or_insert((c.old, c.new));
    }
    merged
        .into_iter()
        .filter(|(_, (old, new))| old != new)
        .map(|(family, (old, new))| ChangedNode {
            family,
            old,
            new,
            color: model.color(family),
        })
        .collect()
}

impl AppState {
    /// Opens the data directory and loads every ready book. Blocking.
    pub fn open(config: ServiceConfig) -> CoreResult<Arc<Self>> {
        config.engine.validate()?;
        let store = Store::open(&config.data_dir)?;
        let stopwords = match &config.engine.stopwords {
            Some(p) => load_stopwords(p)?,
            None => default_stopwords(),
        };
        let affixes = match &config.engine.affixes {
            Some(p) => AffixTable::load(p)?,
            None => AffixTable::default(),
        };
        let mut books = HashMap::new();
        for mut record in store.records()? {
            let mut loaded = None;
            match record.status {
                BookStatus::Ready => match Self::load_book(&store, &record, &config) {
                    Ok(b) => loaded = Some(Arc::new(b)),
                    Err(e) => {
                        record.status = BookStatus::Failed;
                        record.reason = Some(format!("artifacts unreadable: {e}"));
                        store.write_record(&record)?;
                    }
                },
                BookStatus::Ingesting | BookStatus::Building => {
                    record.status = BookStatus::Failed;
                    record.reason = Some("build interrupted by a restart".into());
                    store.write_record(&record)?;
                }
                BookStatus::Failed => {}
            }
            books.insert(record.book_id.clone(), BookEntry { record, loaded });
        }
        tracing::info!("opened {} with {} books", config.data_dir.display(), books.len());
        Ok(Arc::new(AppState {
            config,
            store,
            stopwords,
            affixes,
            books: RwLock::new(books),
            learners: Mutex::new(HashMap::new()),
            sessions: Mutex::new(HashMap::new()),
        }))
    }

    fn load_book(store: &Store, record: &BookRecord, config: &ServiceConfig) -> CoreResult<LoadedBook> {
        let refs = record
            .artifacts
            .as_ref()
            .ok_or_else(|| CoreError::InvalidParameter("ready book without artifacts".into()))?;
        let stopwords: Vec<String> = store.get_artifact(&refs.stopwords)?;
        let artifacts = BookArtifacts::from_parts(
            store.get_artifact(&refs.corpus)?,
            store.get_artifact(&refs.targets)?,
            store.get_artifact(&refs.families)?,
            store.get_artifact(&refs.graph)?,
            stopwords.into_iter().collect(),
        );
        Ok(LoadedBook::new(artifacts, config))
    }

    // -----------------------------------------------------------------------
    // Books

    /// Registers the upload and starts the build in the background. Returns
    /// whether the book is new.
    pub fn upload(self: &Arc<Self>, upload: UploadBook) -> AppResult<(bool, UploadAccepted)> {
        let tag = match upload.format {
            BookFormat::Text => b"text\0".as_slice(),
            BookFormat::Pretagged => b"pretagged\0".as_slice(),
        };
        let book_id = content_id(&[tag, upload.content.as_bytes()].concat());
        let record = {
            let mut books = self.books.write().unwrap();
            if let Some(entry) = books.get(&book_id) {
                let accepted = UploadAccepted {
                    book_id,
                    status: entry.record.status,
                };
                return Ok((false, accepted));
            }
            let e = &self.config.engine;
            let record = BookRecord {
                book_id: book_id.clone(),
                title: upload.title.clone(),
                format: upload.format,
                status: BookStatus::Ingesting,
                reason: None,
                artifacts: None,
                build_params: BuildParams {
                    min_frequency: e.min_frequency,
                    level_cap: e.level_cap,
                    tau: e.tau,
                    degree_cap: e.degree_cap,
                },
                stats: None,
            };
            books.insert(
                book_id.clone(),
                BookEntry {
                    record: record.clone(),
                    loaded: None,
                },
            );
            record
        };
        self.store.write_record(&record)?;
        let state = Arc::clone(self);
        let id = book_id.clone();
        tokio::task::spawn_blocking(move || state.run_build(&id, upload));
        Ok((
            true,
            UploadAccepted {
                book_id,
                status: BookStatus::Ingesting,
            },
        ))
    }

    fn update_record(&self, book_id: &str, f: impl FnOnce(&mut BookEntry)) {
        let record = {
            let mut books = self.books.write().unwrap();
            let Some(entry) = books.get_mut(book_id) else { return };
            f(entry);
            entry.record.clone()
        };
        if let Err(e) = self.store.write_record(&record) {
            tracing::error!("writing record {book_id}: {e}");
        }
    }

    fn run_build(&self, book_id: &str, upload: UploadBook) {
        tracing::info!("building book {book_id} ({})", upload.title);
        let result = self.build(book_id, &upload);
        match result {
            Ok((refs, book)) => {
                let stats = book.artifacts.stats();
                tracing::info!("book {book_id} ready: {stats:?}");
                self.update_record(book_id, |e| {
                    e.record.status = BookStatus::Ready;
                    e.record.artifacts = Some(refs);
                    e.record.stats = Some(stats);
                    e.loaded = Some(Arc::new(book));
                });
            }
            Err(err) => {
                tracing::warn!("book {book_id} failed: {err}");
                let reason = match err {
                    CoreError::EmptyText => "EmptyText: input text is empty".to_string(),
                    other => other.to_string(),
                };
                self.update_record(book_id, |e| {
                    e.record.status = BookStatus::Failed;
                    e.record.reason = Some(reason);
                });
            }
        }
    }

    fn build(&self, book_id: &str, upload: &UploadBook) -> CoreResult<(ArtifactRefs, LoadedBook)> {
        let mut corpus = match upload.format {
            BookFormat::Text => tokenize_and_tag(&upload.content, &LexiconTagger::new(self.affixes.clone()))?,
            BookFormat::Pretagged => parse_pretagged(&upload.content, book_id)?,
        };
        corpus.book_id = book_id.to_string();
        self.update_record(book_id, |e| e.record.status = BookStatus::Building);
        let embeddings = self
            .config
            .engine
            .embeddings
            .clone()
            .ok_or_else(|| CoreError::InvalidParameter("no embeddings file configured".into()))?;
        let artifacts = build_book(
            corpus,
            self.stopwords.clone(),
            &self.affixes,
            |filter| EmbeddingTable::load(&embeddings, Some(filter)),
            &self.config.engine,
        )?;
        let mut stopwords: Vec<&String> = artifacts.stopwords.iter().collect();
        stopwords.sort();
        let refs = ArtifactRefs {
            corpus: self.store.put_artifact(&artifacts.corpus)?,
            targets: self.store.put_artifact(&artifacts.targets)?,
            families: self.store.put_artifact(&artifacts.families)?,
            graph: self.store.put_artifact(&artifacts.graph)?,
            stopwords: self.store.put_artifact(&stopwords)?,
        };
        Ok((refs, LoadedBook::new(artifacts, &self.config)))
    }

    pub fn status(&self, book_id: &str) -> AppResult<BookStatusResponse> {
        let books = self.books.read().unwrap();
        let r = &books
            .get(book_id)
            .ok_or_else(|| AppError::NotFound(format!("book {book_id}")))?
            .record;
        Ok(BookStatusResponse {
            book_id: r.book_id.clone(),
            title: r.title.clone(),
            status: r.status,
            reason: r.reason.clone(),
            stats: r.stats,
        })
    }

    pub fn ready_book(&self, book_id: &str) -> AppResult<Arc<LoadedBook>> {
        let books = self.books.read().unwrap();
        let entry = books
            .get(book_id)
            .ok_or_else(|| AppError::NotFound(format!("book {book_id}")))?;
        entry
            .loaded
            .clone()
            .ok_or_else(|| AppError::NotReady(book_id.to_string()))
    }

    // -----------------------------------------------------------------------
    // Learners

    fn slot(&self, learner: &str, book: &str) -> Arc<tokio::sync::Mutex<LearnerSlot>> {
        let mut learners = self.learners.lock().unwrap();
        Arc::clone(learners.entry((learner.to_string(), book.to_string())).or_default())
    }

    /// Rebuilds a model from its update log. The snapshot is only checked
    /// against the replay.
    fn load_model(&self, book: &LoadedBook, learner: &str, book_id: &str) -> CoreResult<LearnerModel> {
        let graph = &book.artifacts.graph;
        let snapshot = self.store.read_snapshot(learner, book_id)?;
        let params = snapshot
            .as_ref()
            .map_or(self.config.engine.update_params(), |s| s.params);
        let mut model = LearnerModel::new(graph, learner, params);
        if let Some(log) = self.store.read_updates(learner, book_id)? {
            for e in log.iter().filter(|e| e.kind != UpdateKind::Spread) {
                model.apply_at(graph, e.family, e.r, e.kind, e.timestamp)?;
            }
        }
        if snapshot.is_some_and(|s| s != model) {
            tracing::warn!("snapshot of {learner}/{book_id} differs from its log; using the log");
            self.store.write_snapshot(book_id, &model)?;
        }
        Ok(model)
    }

    fn model<'a>(
        &self,
        slot: &'a mut Option<LearnerModel>,
        book: &LoadedBook,
        learner: &str,
        book_id: &str,
    ) -> AppResult<&'a mut LearnerModel> {
        if slot.is_none() {
            *slot = Some(self.load_model(book, learner, book_id)?);
        }
        Ok(slot.as_mut().expect("just loaded"))
    }

    /// Appends the log entries after `from` and replaces the snapshot.
    fn persist(&self, book_id: &str, model: &LearnerModel, from: usize) -> AppResult<()> {
        self.store
            .append_updates(&model.learner_id, book_id, &model.log()[from..])?;
        self.store.write_snapshot(book_id, model)?;
        Ok(())
    }

    pub async fn learner_model(&self, learner: &str, book_id: &str) -> AppResult<LearnerModel> {
        validate_learner(learner)?;
        let book = self.ready_book(book_id)?;
        let slot = self.slot(learner, book_id);
        let mut slot = slot.lock().await;
        Ok(self.model(&mut slot.model, &book, learner, book_id)?.clone())
    }

    pub async fn start_warmstart(
        &self,
        learner: &str,
        book_id: &str,
        req: WarmstartRequest,
    ) -> AppResult<WarmstartChecklist> {
        validate_learner(learner)?;
        let book = self.ready_book(book_id)?;
        let slot = self.slot(learner, book_id);
        let mut slot = slot.lock().await;
        self.model(&mut slot.model, &book, learner, book_id)?;
        let size = req.test_size.unwrap_or(self.config.engine.warmstart_size);
        let a = &book.artifacts;
        let words = plan_warmstart(&a.graph, &a.centrality, size)
            .into_iter()
            .map(|family| ChecklistWord {
                family,
                word: a
                    .families
                    .get(family)
                    .expect("graph nodes are families")
                    .representative
                    .lemma
                    .clone(),
            })
            .collect();
        Ok(WarmstartChecklist {
            learner_id: learner.to_string(),
            book_id: book_id.to_string(),
            words,
        })
    }

    /// Applies every answer in order, or none if any is invalid.
    pub async fn submit_warmstart(
        &self,
        learner: &str,
        book_id: &str,
        answers: WarmstartAnswers,
    ) -> AppResult<WarmstartResult> {
        validate_learner(learner)?;
        let book = self.ready_book(book_id)?;
        let graph = &book.artifacts.graph;
        if let Some(a) = answers.answers.iter().find(|a| !graph.contains(a.family)) {
            return Err(AppError::BadRequest(format!(
                "family {} is not in book {book_id}",
                a.family
            )));
        }
        let slot = self.slot(learner, book_id);
        let mut slot = slot.lock().await;
        let model = self.model(&mut slot.model, &book, learner, book_id)?;
        let from = model.log().len();
        let mut changes = Vec::new();
        for a in &answers.answers {
            changes.extend(model.apply_yesno(graph, a.family, a.known)?);
        }
        self.persist(book_id, model, from)?;
        Ok(WarmstartResult {
            summary: summary(model, book_id),
            changed: changed_nodes(model, changes),
        })
    }

    // -----------------------------------------------------------------------
    // Sessions

    pub async fn start_session(&self, learner: &str, book_id: &str, req: StartSession) -> AppResult<SessionInfo> {
        validate_learner(learner)?;
        let book = self.ready_book(book_id)?;
        let slot = self.slot(learner, book_id);
        let mut slot = slot.lock().await;
        let model = self.model(&mut slot.model, &book, learner, book_id)?;
        let a = &book.artifacts;
        let e = &self.config.engine;
        let plan = plan_session_where(
            &a.graph,
            &a.centrality,
            model,
            e.session_size,
            e.retirement_threshold,
            |f| book.is_eligible(f),
        );
        let id = uuid::Uuid::new_v4().to_string();
        let seed = e.shuffle_seed ^ u64::from_le_bytes(Sha256::digest(id.as_bytes())[..8].try_into().unwrap());
        let session = Session {
            id: id.clone(),
            mode: req.mode,
            targets: plan.targets,
            cursor: 0,
            seed,
            current: None,
            answered: HashSet::new(),
            results: Vec::new(),
        };
        let info = session.info(learner, book_id);
        {
            let mut sessions = self.sessions.lock().unwrap();
            if let Some(old) = slot.session.take() {
                sessions.remove(&old.id);
            }
            sessions.insert(id, (learner.to_string(), book_id.to_string()));
        }
        slot.session = Some(session);
        Ok(info)
    }

    fn session_key(&self, session_id: &str) -> AppResult<SlotKey> {
        self.sessions
            .lock()
            .unwrap()
            .get(session_id)
            .cloned()
            .ok_or_else(|| AppError::NotFound(format!("session {session_id}")))
    }

    pub async fn next_activity(&self, session_id: &str) -> AppResult<NextActivity> {
        let (learner, book_id) = self.session_key(session_id)?;
        let book = self.ready_book(&book_id)?;
        let slot = self.slot(&learner, &book_id);
        let mut guard = slot.lock().await;
        let slot = &mut *guard;
        let model = self.model(&mut slot.model, &book, &learner, &book_id)?;
        let session = slot
            .session
            .as_mut()
            .filter(|s| s.id == session_id)
            .ok_or_else(|| AppError::NotFound(format!("session {session_id}")))?;
        loop {
            if let Some(a) = &session.current {
                return Ok(NextActivity::Activity {
                    activity: a.client_view().clone(),
                });
            }
            let Some(&target) = session.targets.get(session.cursor) else {
                return Ok(NextActivity::Complete {
                    summary: session.summary(),
                });
            };
            let settings = activity_settings(&self.config.engine, &self.config.aids, session.seed);
            match generate_activity(&book.artifacts.book(), model, target, session.mode, &settings) {
                Ok(a) => session.current = Some(a),
                Err(e) => {
                    tracing::warn!("session {session_id}: skipping family {target}: {e}");
                    session.cursor += 1;
                }
            }
        }
    }

    pub async fn submit_answer(&self, session_id: &str, answer: SubmitAnswer) -> AppResult<AnswerResult> {
        let (learner, book_id) = self.session_key(session_id)?;
        let book = self.ready_book(&book_id)?;
        let slot = self.slot(&learner, &book_id);
        let mut guard = slot.lock().await;
        let slot = &mut *guard;
        let model = self.model(&mut slot.model, &book, &learner, &book_id)?;
        let session = slot
            .session
            .as_mut()
            .filter(|s| s.id == session_id)
            .ok_or_else(|| AppError::NotFound(format!("session {session_id}")))?;
        if session.answered.contains(&answer.activity_id) {
            return Err(AppError::AlreadyAnswered(answer.activity_id));
        }
        let activity = session
            .current
            .as_ref()
            .filter(|a| a.view.activity_id == answer.activity_id)
            .ok_or_else(|| AppError::NotFound(format!("activity {}", answer.activity_id)))?;
        let graded = grade(activity, &answer.chosen)?;
        let changed = match session.mode {
            Mode::Testing => {
                let from = model.log().len();
                let changes = model.apply_response(&book.artifacts.graph, activity.target_family, graded.r)?;
                self.persist(&book_id, model, from)?;
                changed_nodes(model, changes)
            }
            Mode::Learning => Vec::new(),
        };
        let result = AnswerResult {
            activity_id: answer.activity_id.clone(),
            correct: graded.correct,
            answer: activity.answer_token.clone(),
            mode: session.mode,
            changed,
        };
        session.results.push(WordResult {
            activity_id: answer.activity_id.clone(),
            answer: result.answer.clone(),
            correct: result.correct,
        });
        session.answered.insert(answer.activity_id);
        session.current = None;
        session.cursor += 1;
        Ok(result)
    }

    /// The answer to the activity currently served in a session.
    pub async fn oracle(&self, session_id: &str) -> AppResult<OracleAnswer> {
        let (learner, book_id) = self.session_key(session_id)?;
        let slot = self.slot(&learner, &book_id);
        let slot = slot.lock().await;
        let activity = slot
            .session
            .as_ref()
            .filter(|s| s.id == session_id)
            .and_then(|s| s.current.as_ref())
            .ok_or_else(|| AppError::NotFound(format!("served activity in session {session_id}")))?;
        Ok(OracleAnswer {
            activity_id: activity.view.activity_id.clone(),
            answer: activity.answer_token.clone(),
        })
    }

    // -----------------------------------------------------------------------
    // Open learner model

    pub async fn learner_view(&self, learner: &str, book_id: &str, expand: Option<FamilyId>) -> AppResult<LearnerView> {
        validate_learner(learner)?;
        let book = self.ready_book(book_id)?;
        let slot = self.slot(learner, book_id);
        let mut slot = slot.lock().await;
        let model = self.model(&mut slot.model, &book, learner, book_id)?;
        let a = &book.artifacts;
        let e = &self.config.engine;
        let selected: HashSet<FamilyId> = plan_session_where(
            &a.graph,
            &a.centrality,
            model,
            e.session_size,
            e.retirement_threshold,
            |f| book.is_eligible(f),
        )
        .targets
        .into_iter()
        .collect();
        let nodes = book
            .export
            .nodes
            .iter()
            .map(|n| ViewNode {
                id: n.id,
                representative: n.representative.clone(),
                mastery: model.mastery(n.id),
                touched: model.is_touched(n.id),
                color: model.color(n.id),
                selected: selected.contains(&n.id),
            })
            .collect();
        let expanded = match expand {
            None => None,
            Some(id) => {
                let n = book
                    .export
                    .nodes
                    .get(id.index())
                    .ok_or_else(|| AppError::NotFound(format!("family {id}")))?;
                Some(ExpandedFamily {
                    id,
                    representative: n.representative.clone(),
                    members: n.members.clone(),
                })
            }
        };
        Ok(LearnerView {
            learner_id: learner.to_string(),
            book_id: book_id.to_string(),
            nodes,
            edges: book.export.edges.clone(),
            expanded,
        })
    }
}

fn summary(model: &LearnerModel, book_id: &str) -> ModelSummary {
    ModelSummary {
        learner_id: model.learner_id.clone(),
        book_id: book_id.to_string(),
        nodes: model.node_count(),
        touched: (0..model.node_count() as u32)
            .filter(|&i| model.is_touched(FamilyId(i)))
            .count(),
        above_half: model.mastery_scores().iter().filter(|&&m| m > 0.5).count(),
        log_length: model.log().len(),
    }
}
