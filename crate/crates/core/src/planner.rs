//! Closeness centrality and greedy session / warm-start selection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner_model::LearnerModel;
use crate::morphology::FamilyId;
use crate::semantics::FamilyGraph;

pub const DEFAULT_SESSION_SIZE: usize = 20;
pub const DEFAULT_RETIREMENT: f64 = 0.8;

/// Wasserman-Faust closeness over hop distances: the reachable fraction
/// times the inverse mean distance to the reachable nodes.
pub fn closeness(graph: &FamilyGraph, node: FamilyId) -> Result<f64> {
    if !graph.contains(node) {
        return Err(Error::UnknownNode(node));
    }
    Ok(closeness_unchecked(graph, node))
}

fn closeness_unchecked(graph: &FamilyGraph, node: FamilyId) -> f64 {
    let n = graph.node_count();
    if n <= 1 {
        return 0.0;
    }
    let (reached, total) = graph
        .hop_distances(node)
        .into_iter()
        .flatten()
        .filter(|&d| d > 0)
        .fold((0usize, 0usize), |(r, s), d| (r + 1, s + d));
    if reached == 0 {
        return 0.0;
    }
    let r = reached as f64;
    (r / (n - 1) as f64) * (r / total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralityScore {
    pub family: FamilyId,
    pub score: f64,
}

/// Closeness of every node, computed once per graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Centrality {
    scores: Vec<f64>,
    /// Node ids by (score desc, id asc).
    ranking: Vec<FamilyId>,
}

impl Centrality {
    pub fn compute(graph: &FamilyGraph) -> Self {
        let scores: Vec<f64> = (0..graph.node_count() as u32)
            .into_par_iter()
            .map(|i| closeness_unchecked(graph, FamilyId(i)))
            .collect();
        let mut ranking: Vec<FamilyId> = (0..scores.len() as u32).map(FamilyId).collect();
        ranking.sort_by(|a, b| scores[b.index()].total_cmp(&scores[a.index()]).then(a.cmp(b)));
        Centrality { scores, ranking }
    }

    pub fn score(&self, family: FamilyId) -> Option<f64> {
        self.scores.get(family.index()).copied()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn ranking(&self) -> &[FamilyId] {
        &self.ranking
    }

    pub fn ranked(&self) -> impl Iterator<Item = CentralityScore> + '_ {
        self.ranking.iter().map(|&family| CentralityScore {
            family,
            score: self.scores[family.index()],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionPlan {
    pub targets: Vec<FamilyId>,
    /// Learner and log length of the model snapshot the plan was made from.
    pub created_from: String,
}

/// Walks the ranking and takes each eligible node not adjacent to an
/// already selected one.
fn greedy_select(
    graph: &FamilyGraph,
    centrality: &Centrality,
    size: usize,
    eligible: impl Fn(FamilyId) -> bool,
) -> Vec<FamilyId> {
    let mut selected: Vec<FamilyId> = Vec::with_capacity(size);
    let mut blocked = vec![false; graph.node_count()];
    for &node in centrality.ranking() {
        if selected.len() >= size {
            break;
        }
        if blocked[node.index()] || !eligible(node) {
            continue;
        }
        selected.push(node);
        for &(nb, _) in graph.neighbors(node) {
            blocked[nb.index()] = true;
        }
    }
    selected
}

fn snapshot_ref(model: &LearnerModel) -> String {
    format!("{}@{}", model.learner_id, model.log().len())
}

pub fn plan_session(
    graph: &FamilyGraph,
    centrality: &Centrality,
    model: &LearnerModel,
    session_size: usize,
    retirement: f64,
) -> SessionPlan {
    plan_session_where(graph, centrality, model, session_size, retirement, |_| true)
}

/// [`plan_session`] restricted to nodes accepted by `usable`, e.g. families
/// that have enough sentences for an activity.
pub fn plan_session_where(
    graph: &FamilyGraph,
    centrality: &Centrality,
    model: &LearnerModel,
    session_size: usize,
    retirement: f64,
    usable: impl Fn(FamilyId) -> bool,
) -> SessionPlan {
    let targets = greedy_select(graph, centrality, session_size, |f| {
        model.mastery(f) < retirement && usable(f)
    });
    SessionPlan {
        targets,
        created_from: snapshot_ref(model),
    }
}

/// Same selection as a session, without the retirement filter.
pub fn plan_warmstart(graph: &FamilyGraph, centrality: &Centrality, test_size: usize) -> Vec<FamilyId> {
    greedy_select(graph, centrality, test_size, |_| true)
}
