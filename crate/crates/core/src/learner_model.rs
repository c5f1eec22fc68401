//! Per-learner mastery overlay with one-hop spreading activation.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphology::FamilyId;
use crate::semantics::FamilyGraph;

pub const INITIAL_MASTERY: f64 = 0.5;
pub const YELLOW_HALF_WIDTH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct UpdateParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for UpdateParams {
    fn default() -> Self {
        UpdateParams { alpha: 0.3, beta: 0.1 }
    }
}

impl UpdateParams {
    /// Requires `0 < beta <= alpha <= 1`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = UpdateParams { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta > 0.0 && self.beta <= self.alpha && self.alpha <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "need 0 < beta <= alpha <= 1, got alpha={} beta={}",
                self.alpha, self.beta
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "lowercase")]
pub enum UpdateKind {
    Direct,
    Spread,
    Yesno,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct LogEntry {
    pub timestamp: DateTime<Utc>,
    pub family: FamilyId,
    pub r: i8,
    pub kind: UpdateKind,
}

/// One node touched by an update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct NodeChange {
    pub family: FamilyId,
    pub old: f64,
    pub new: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "UPPERCASE")]
pub enum Band {
    Grey,
    Yellow,
    Green,
    Red,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct Color {
    pub band: Band,
    /// 0 to 1; for GREEN and RED the distance into the band.
    pub intensity: f64,
}

pub fn mastery_color(m: f64, touched: bool) -> Color {
    let lo = INITIAL_MASTERY - YELLOW_HALF_WIDTH;
    let hi = INITIAL_MASTERY + YELLOW_HALF_WIDTH;
    let (band, intensity) = if !touched {
        (Band::Grey, 0.0)
    } else if m > hi {
        (Band::Green, ((m - hi) / (1.0 - hi)).min(1.0))
    } else if m < lo {
        (Band::Red, ((lo - m) / lo).min(1.0))
    } else {
        (Band::Yellow, 1.0)
    };
    Color { band, intensity }
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct LearnerModel {
    pub learner_id: String,
    pub graph_ref: String,
    pub params: UpdateParams,
    mastery: Vec<f64>,
    touched: Vec<bool>,
    log: Vec<LogEntry>,
}

#[derive(Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
struct ModelFile {
    learner_id: String,
    graph_ref: String,
    mastery: BTreeMap<FamilyId, f64>,
    touched: BTreeMap<FamilyId, bool>,
    params: UpdateParams,
    update_log: Vec<LogEntry>,
}

#[cfg(feature = "schema")]
impl schemars::JsonSchema for LearnerModel {
    fn schema_name() -> std::borrow::Cow<'static, str> {
        "LearnerModel".into()
    }

    fn json_schema(generator: &mut schemars::SchemaGenerator) -> schemars::Schema {
        ModelFile::json_schema(generator)
    }
}

impl From<LearnerModel> for ModelFile {
    fn from(m: LearnerModel) -> Self {
        let ids = (0..m.mastery.len() as u32).map(FamilyId);
        ModelFile {
            mastery: ids.clone().zip(m.mastery.iter().copied()).collect(),
            touched: ids.zip(m.touched.iter().copied()).collect(),
            learner_id: m.learner_id,
            graph_ref: m.graph_ref,
            params: m.params,
            update_log: m.log,
        }
    }
}

impl TryFrom<ModelFile> for LearnerModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        let n = f.mastery.len();
        let dense = |keys: Vec<FamilyId>| keys.iter().enumerate().all(|(i, k)| k.index() == i);
        if !dense(f.mastery.keys().copied().collect())
            || !dense(f.touched.keys().copied().collect())
            || f.touched.len() != n
        {
            return Err(Error::InvalidParameter(
                "mastery and touched maps must cover ids 0..n".into(),
            ));
        }
        if f.mastery.values().any(|m| !(0.0..=1.0).contains(m)) {
            return Err(Error::InvalidParameter("mastery outside [0, 1]".into()));
        }
        if let Some(e) = f.update_log.iter().find(|e| e.family.index() >= n || e.r.abs() != 1) {
            return Err(Error::InvalidParameter(format!(
                "bad log entry for family {}",
                e.family
            )));
        }
        Ok(LearnerModel {
            learner_id: f.learner_id,
            graph_ref: f.graph_ref,
            params: f.params,
            mastery: f.mastery.into_values().collect(),
            touched: f.touched.into_values().collect(),
            log: f.update_log,
        })
    }
}

impl LearnerModel {
    pub fn new(graph: &FamilyGraph, learner_id: impl Into<String>, params: UpdateParams) -> Self {
        LearnerModel {
            learner_id: learner_id.into(),
            graph_ref: graph.book_id.clone(),
            params,
            mastery: vec![INITIAL_MASTERY; graph.node_count()],
            touched: vec![false; graph.node_count()],
            log: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.mastery.len()
    }

    pub fn mastery(&self, family: FamilyId) -> f64 {
        self.mastery.get(family.index()).copied().unwrap_or(INITIAL_MASTERY)
    }

    pub fn mastery_scores(&self) -> &[f64] {
        &self.mastery
    }

    pub fn is_touched(&self, family: FamilyId) -> bool {
        self.touched.get(family.index()).copied().unwrap_or(false)
    }

    pub fn color(&self, family: FamilyId) -> Color {
        mastery_color(self.mastery(family), self.is_touched(family))
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn count_above(&self, threshold: f64) -> usize {
        self.mastery.iter().filter(|&&m| m > threshold).count()
    }

    fn check(&self, graph: &FamilyGraph, family: FamilyId) -> Result<()> {
        if graph.node_count() != self.mastery.len() {
            return Err(Error::InvalidParameter(format!(
                "model has {} nodes, graph has {}",
                self.mastery.len(),
                graph.node_count()
            )));
        }
        if !graph.contains(family) {
            return Err(Error::UnknownNode(family));
        }
        Ok(())
    }

    /// Direct update of `family` by `r` plus one hop of spreading to its
    /// neighbors. Returns every node that was updated, target first.
    pub fn apply_response(&mut self, graph: &FamilyGraph, family: FamilyId, r: i8) -> Result<Vec<NodeChange>> {
        self.apply_at(graph, family, r, UpdateKind::Direct, Utc::now())
    }

    pub fn apply_yesno(&mut self, graph: &FamilyGraph, family: FamilyId, known: bool) -> Result<Vec<NodeChange>> {
        self.apply_at(graph, family, if known { 1 } else { -1 }, UpdateKind::Yesno, Utc::now())
    }

    pub fn apply_at(
        &mut self,
        graph: &FamilyGraph,
        family: FamilyId,
        r: i8,
        kind: UpdateKind,
        timestamp: DateTime<Utc>,
    ) -> Result<Vec<NodeChange>> {
        self.check(graph, family)?;
        if r != 1 && r != -1 {
            return Err(Error::InvalidParameter(format!(
                "response polarity must be +1 or -1, got {r}"
            )));
        }
        if kind == UpdateKind::Spread {
            return Err(Error::InvalidParameter(
                "spread updates are derived, not applied".into(),
            ));
        }
        let rf = f64::from(r);
        let mut changes = Vec::with_capacity(1 + graph.degree(family));

        let i = family.index();
        let old = self.mastery[i];
        let new = clamp01(old + old * self.params.alpha * rf);
        self.mastery[i] = new;
        self.touched[i] = true;
        changes.push(NodeChange { family, old, new });
        self.log.push(LogEntry {
            timestamp,
            family,
            r,
            kind,
        });

        for &(j, w) in graph.neighbors(family) {
            let old = self.mastery[j.index()];
            let new = clamp01(old + old * (self.params.beta * rf * w));
            self.mastery[j.index()] = new;
            self.touched[j.index()] = true;
            changes.push(NodeChange { family: j, old, new });
            self.log.push(LogEntry {
                timestamp,
                family: j,
                r,
                kind: UpdateKind::Spread,
            });
        }
        Ok(changes)
    }

    /// Re-applies the non-derived log entries to a fresh model.
    pub fn replay(&self, graph: &FamilyGraph) -> Result<LearnerModel> {
        let mut fresh = LearnerModel::new(graph, self.learner_id.clone(), self.params);
        fresh.graph_ref = self.graph_ref.clone();
        for e in self.log.iter().filter(|e| e.kind != UpdateKind::Spread) {
            fresh.apply_at(graph, e.family, e.r, e.kind, e.timestamp)?;
        }
        Ok(fresh)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, serde_json::to_vec_pretty(self)?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}
