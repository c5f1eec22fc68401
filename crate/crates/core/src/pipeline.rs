//! End-to-end build of a book's artifacts from a tagged corpus.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::activities::{ActivitySettings, AidTemplates, Book};
use crate::config::Config;
use crate::error::Result;
use crate::ingestion::{extract_targets, LexicalUnit, TaggedCorpus, TargetIndex};
use crate::morphology::{build_families, AffixTable, FamilySet};
use crate::planner::Centrality;
use crate::semantics::{build_graph, EmbeddingTable, FamilyGraph};

/// Words to keep when loading embeddings for `targets`.
pub fn vocabulary_filter(targets: &TargetIndex) -> HashSet<String> {
    let mut words = HashSet::new();
    for unit in targets.units() {
        words.insert(unit.lemma.clone());
        words.extend(targets.forms(unit).map(str::to_string));
    }
    words
}

/// Member lemmas and observed forms of every family.
pub fn family_vocabulary(families: &FamilySet) -> HashSet<String> {
    let mut words = HashSet::new();
    for m in families.iter().flat_map(|f| &f.members) {
        words.insert(m.unit.lemma.clone());
        words.extend(m.forms.iter().cloned());
    }
    words
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct BuildStats {
    pub distinct_types: usize,
    pub targets: usize,
    pub families: usize,
    pub nodes: usize,
    pub edges: usize,
}

impl BuildStats {
    pub fn target_ratio(&self) -> f64 {
        self.targets as f64 / self.distinct_types as f64
    }

    pub fn family_ratio(&self) -> f64 {
        self.families as f64 / self.targets as f64
    }

    pub fn edges_per_node(&self) -> f64 {
        self.edges as f64 / self.nodes as f64
    }
}

/// Everything derived from one book.
#[derive(Debug, Clone)]
pub struct BookArtifacts {
    pub corpus: TaggedCorpus,
    pub targets: TargetIndex,
    pub families: FamilySet,
    pub graph: FamilyGraph,
    pub centrality: Centrality,
    pub book_frequencies: HashMap<LexicalUnit, usize>,
    pub stopwords: HashSet<String>,
}

impl BookArtifacts {
    /// Reassembles artifacts loaded from storage.
    pub fn from_parts(
        corpus: TaggedCorpus,
        targets: TargetIndex,
        families: FamilySet,
        graph: FamilyGraph,
        stopwords: HashSet<String>,
    ) -> Self {
        let centrality = Centrality::compute(&graph);
        let book_frequencies = corpus.unit_frequencies();
        BookArtifacts {
            corpus,
            targets,
            families,
            graph,
            centrality,
            book_frequencies,
            stopwords,
        }
    }

    pub fn stats(&self) -> BuildStats {
        BuildStats {
            distinct_types: self.targets.distinct_types,
            targets: self.targets.len(),
            families: self.families.len(),
            nodes: self.graph.node_count(),
            edges: self.graph.edge_count(),
        }
    }

    pub fn book(&self) -> Book<'_> {
        Book {
            corpus: &self.corpus,
            targets: &self.targets,
            families: &self.families,
            graph: &self.graph,
            book_frequencies: &self.book_frequencies,
            stopwords: &self.stopwords,
        }
    }
}

/// Runs target extraction, family building and graph construction.
/// `embeddings` is called with the vocabulary worth loading.
pub fn build_book(
    corpus: TaggedCorpus,
    stopwords: HashSet<String>,
    affixes: &AffixTable,
    embeddings: impl FnOnce(&HashSet<String>) -> Result<EmbeddingTable>,
    config: &Config,
) -> Result<BookArtifacts> {
    config.validate()?;
    let targets = extract_targets(&corpus, &stopwords, config.min_frequency)?;
    let table = embeddings(&vocabulary_filter(&targets))?;
    let families = build_families(&targets, affixes, config.level_cap, Some(&table));
    let graph = build_graph(&families, &table, config.graph_params())?;
    Ok(BookArtifacts::from_parts(corpus, targets, families, graph, stopwords))
}

pub fn activity_settings<'a>(config: &'a Config, aids: &'a AidTemplates, seed: u64) -> ActivitySettings<'a> {
    ActivitySettings {
        weights: &config.gdex,
        known_threshold: config.known_threshold,
        aids,
        seed,
    }
}
