//! Engine configuration, read from TOML. Every key is optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner_model::UpdateParams;
use crate::semantics::GraphParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GdexWeights {
    pub length: f64,
    pub known_words: f64,
    pub pronoun: f64,
    pub completeness: f64,
    pub position: f64,
    /// Word-token band that scores a full length feature.
    pub ideal_min: usize,
    pub ideal_max: usize,
    /// Lengths at or below / at or above these score zero.
    pub length_floor: usize,
    pub length_ceiling: usize,
    /// Fraction of the sentence at the end where a target counts as late.
    pub tail_fraction: f64,
}

impl Default for GdexWeights {
    fn default() -> Self {
        GdexWeights {
            length: 0.3,
            known_words: 0.3,
            pronoun: 0.15,
            completeness: 0.15,
            position: 0.1,
            ideal_min: 10,
            ideal_max: 25,
            length_floor: 4,
            length_ceiling: 50,
            tail_fraction: 0.2,
        }
    }
}

impl GdexWeights {
    pub fn total(&self) -> f64 {
        self.length + self.known_words + self.pronoun + self.completeness + self.position
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub min_frequency: usize,
    pub level_cap: u8,
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub degree_cap: usize,
    pub session_size: usize,
    pub warmstart_size: usize,
    pub retirement_threshold: f64,
    /// Mastery at or above which a context word counts as known.
    pub known_threshold: f64,
    pub shuffle_seed: u64,
    pub gdex: GdexWeights,
    pub embeddings: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub affixes: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            min_frequency: 5,
            level_cap: 6,
            alpha: 0.3,
            beta: 0.1,
            tau: 0.3,
            degree_cap: 5,
            session_size: 20,
            warmstart_size: 20,
            retirement_threshold: 0.8,
            known_threshold: 0.5,
            shuffle_seed: 0x5eed,
            gdex: GdexWeights::default(),
            embeddings: None,
            stopwords: None,
            affixes: None,
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.update_params().validate()?;
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.min_frequency == 0 {
            return bad("min_frequency must be >= 1");
        }
        if !(2..=6).contains(&self.level_cap) {
            return bad("level_cap must be within 2..=6");
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return bad("tau must be within (0, 1)");
        }
        if self.degree_cap == 0 {
            return bad("degree_cap must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.retirement_threshold) {
            return bad("retirement_threshold must be within [0, 1]");
        }
        let g = &self.gdex;
        let weights = [g.length, g.known_words, g.pronoun, g.completeness, g.position];
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || g.total() <= 0.0 {
            return bad("gdex weights must be non-negative with a positive sum");
        }
        if !(g.length_floor < g.ideal_min && g.ideal_min <= g.ideal_max && g.ideal_max < g.length_ceiling) {
            return bad("gdex lengths need floor < ideal_min <= ideal_max < ceiling");
        }
        if !(0.0..1.0).contains(&g.tail_fraction) {
            return bad("gdex tail_fraction must be within [0, 1)");
        }
        Ok(())
    }

    pub fn update_params(&self) -> UpdateParams {
        UpdateParams {
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    pub fn graph_params(&self) -> GraphParams {
        GraphParams {
            tau: self.tau,
            degree_cap: self.degree_cap,
        }
    }
}
