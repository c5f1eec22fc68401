//! Turns a book into a graph of word families, overlays a per-learner mastery
//! model on it and generates multi-gap practice activities from the book's own
//! sentences.
//!
//! Pipeline: [`ingestion`] tags the text and extracts learning targets,
//! [`morphology`] groups the targets into word families, [`semantics`] links
//! families by embedding similarity, [`learner_model`] tracks mastery per
//! family, [`planner`] ranks families by closeness centrality and
//! [`activities`] builds and grades the exercises. [`pipeline`] runs the
//! offline build in one call.

pub mod activities;
pub mod config;
pub mod error;
pub mod ingestion;
pub mod learner_model;
pub mod morphology;
pub mod pipeline;
pub mod planner;
pub mod pos;
pub mod semantics;

pub use config::Config;
pub use error::{Error, Result};
pub use ingestion::{LexicalUnit, TaggedCorpus, TaggedToken, TargetIndex};
pub use learner_model::{LearnerModel, UpdateParams};
pub use morphology::{AffixTable, FamilyId, WordFamily};
pub use pipeline::BookArtifacts;
pub use pos::Pos;
pub use semantics::{EmbeddingTable, FamilyGraph};
