//! On-disk layout: content-addressed artifacts, one record per book, and per
//! learner an append-only update log next to an atomically replaced snapshot.
//!
//! ```text
//! data_dir/artifacts/<sha256>.json
//! data_dir/books/<book_id>.json
//! data_dir/learners/<learner_id>/<book_id>/updates.jsonl
//! data_dir/learners/<learner_id>/<book_id>/model.json
//! ```

use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use lexigraph_api::{BookFormat, BookStatus, BuildStats};
use lexigraph_core::error::{Error, Result};
use lexigraph_core::learner_model::{LearnerModel, LogEntry};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildParams {
    pub min_frequency: usize,
    pub level_cap: u8,
    pub tau: f64,
    pub degree_cap: usize,
}

/// Artifact hashes of a ready book.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRefs {
    pub corpus: String,
    pub targets: String,
    pub families: String,
    pub graph: String,
    pub stopwords: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BookRecord {
    pub book_id: String,
    pub title: String,
    pub format: BookFormat,
    pub status: BookStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub artifacts: Option<ArtifactRefs>,
    pub build_params: BuildParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<BuildStats>,
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through a temporary file and a rename so readers never see a
/// partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(io(&tmp))?;
    f.write_all(bytes).map_err(io(&tmp))?;
    f.sync_all().map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(io(path))
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        for sub in ["artifacts", "books", "learners"] {
            let dir = root.join(sub);
            fs::create_dir_all(&dir).map_err(io(&dir))?;
        }
        Ok(Store { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn put_artifact<T: Serialize>(&self, value: &T) -> Result<String> {
        let bytes = serde_json::to_vec(value)?;
        let hash = hex::encode(Sha256::digest(&bytes));
        let path = self.root.join("artifacts").join(format!("{hash}.json"));
        if !path.exists() {
            write_atomic(&path, &bytes)?;
        }
        Ok(hash)
    }

    pub fn get_artifact<T: DeserializeOwned>(&self, hash: &str) -> Result<T> {
        let path = self.root.join("artifacts").join(format!("{hash}.json"));
        let bytes = fs::read(&path).map_err(io(&path))?;
        if hex::encode(Sha256::digest(&bytes)) != hash {
            return Err(Error::InvalidParameter(format!("artifact {hash} is corrupt")));
        }
        Ok(serde_json::from_slice(&bytes)?)
    }

    pub fn write_record(&self, record: &BookRecord) -> Result<()> {
        let path = self.root.join("books").join(format!("{}.json", record.book_id));
        write_atomic(&path, &serde_json::to_vec_pretty(record)?)
    }

    pub fn records(&self) -> Result<Vec<BookRecord>> {
        let dir = self.root.join("books");
        let mut out = Vec::new();
        for entry in fs::read_dir(&dir).map_err(io(&dir))? {
            let path = entry.map_err(io(&dir))?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let bytes = fs::read(&path).map_err(io(&path))?;
                out.push(serde_json::from_slice(&bytes)?);
            }
        }
        out.sort_by(|a: &BookRecord, b| a.book_id.cmp(&b.book_id));
        Ok(out)
    }

    fn learner_dir(&self, learner: &str, book: &str) -> PathBuf {
        self.root.join("learners").join(learner).join(book)
    }

    pub fn append_updates(&self, learner: &str, book: &str, entries: &[LogEntry]) -> Result<()> {
        if entries.is_empty() {
            return Ok(());
        }
        let dir = self.learner_dir(learner, book);
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        let path = dir.join("updates.jsonl");
        let mut buf = Vec::new();
        for e in entries {
            serde_json::to_writer(&mut buf, e)?;
            buf.push(b'\n');
        }
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(io(&path))?;
        f.write_all(&buf).map_err(io(&path))?;
        f.sync_data().map_err(io(&path))
    }

    /// The persisted log; a torn last line from a crash is ignored.
    pub fn read_updates(&self, learner: &str, book: &str) -> Result<Option<Vec<LogEntry>>> {
        let path = self.learner_dir(learner, book).join("updates.jsonl");
        let f = match fs::File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io(&path)(e)),
        };
        let lines: Vec<String> = BufReader::new(f)
            .lines()
            .collect::<std::io::Result<_>>()
            .map_err(io(&path))?;
        let mut out = Vec::with_capacity(lines.len());
        for (i, line) in lines.iter().enumerate() {
            match serde_json::from_str(line) {
                Ok(e) => out.push(e),
                Err(_) if i + 1 == lines.len() => tracing::warn!("{}: dropping torn last line", path.display()),
                Err(e) => {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: e.to_string(),
                    })
                }
            }
        }
        Ok(Some(out))
    }

    pub fn write_snapshot(&self, book: &str, model: &LearnerModel) -> Result<()> {
        let dir = self.learner_dir(&model.learner_id, book);
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        write_atomic(&dir.join("model.json"), &serde_json::to_vec(model)?)
    }

    pub fn read_snapshot(&self, learner: &str, book: &str) -> Result<Option<LearnerModel>> {
        let path = self.learner_dir(learner, book).join("model.json");
        match fs::read(&path) {
            Ok(bytes) => Ok(Some(serde_json::from_slice(&bytes)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io(&path)(e)),
        }
    }
}
