//! Sentence ranking, distractor selection, multi-gap activity assembly and
//! grading.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::Range;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::GdexWeights;
use crate::error::{Error, Result};
use crate::ingestion::{LexicalUnit, TaggedCorpus, TaggedToken, TargetIndex};
use crate::learner_model::LearnerModel;
use crate::morphology::{inflection_suffix, FamilyId, FamilySet, WordFamily};
use crate::pos::Pos;
use crate::semantics::FamilyGraph;

pub const GAP_MARKER: &str = "____";
pub const OPTION_COUNT: usize = 4;
pub const DISTRACTOR_COUNT: usize = OPTION_COUNT - 1;
pub const MIN_SENTENCES: usize = 3;

/// Standalone tokens treated as anaphora.
pub const PRONOUNS: &[&str] = &[
    "he", "she", "it", "they", "him", "her", "them", "his", "hers", "its", "their", "this", "that", "these", "those",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Learning,
    Testing,
}

// ---------------------------------------------------------------------------
// Sentence scoring

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct SentenceScore {
    pub sentence_id: usize,
    pub target: LexicalUnit,
    pub score: f64,
    pub feature_values: BTreeMap<String, f64>,
}

impl SentenceScore {
    /// Recombines the stored feature values with `weights`.
    pub fn recompute(&self, weights: &GdexWeights) -> f64 {
        combine(&self.feature_values, weights)
    }
}

fn combine(f: &BTreeMap<String, f64>, w: &GdexWeights) -> f64 {
    let get = |k: &str| f.get(k).copied().unwrap_or(0.0);
    (w.length * get("length")
        + w.known_words * get("known_words")
        + w.pronoun * get("pronoun")
        + w.completeness * get("completeness")
        + w.position * get("position"))
        / w.total()
}

/// What the scorer needs to know about the learner's vocabulary.
pub struct Vocab<'a> {
    pub families: &'a FamilySet,
    pub model: &'a LearnerModel,
    pub stopwords: &'a HashSet<String>,
    pub known_threshold: f64,
}

impl Vocab<'_> {
    fn is_known(&self, token: &TaggedToken) -> bool {
        if !token.pos.is_content() {
            return true;
        }
        let lower = token.surface.to_lowercase();
        if self.stopwords.contains(&lower) || self.stopwords.contains(&token.lemma) {
            return true;
        }
        LexicalUnit::from_token(token)
            .and_then(|u| self.families.family_of(&u))
            .is_some_and(|f| self.model.mastery(f) >= self.known_threshold)
    }
}

pub fn length_feature(n: usize, w: &GdexWeights) -> f64 {
    if n <= w.length_floor || n >= w.length_ceiling {
        0.0
    } else if n < w.ideal_min {
        (n - w.length_floor) as f64 / (w.ideal_min - w.length_floor) as f64
    } else if n <= w.ideal_max {
        1.0
    } else {
        (w.length_ceiling - n) as f64 / (w.length_ceiling - w.ideal_max) as f64
    }
}

fn is_terminal(surface: &str) -> bool {
    matches!(surface, "." | "!" | "?" | "..." | "…" | "?!" | "!?")
}

fn is_closer(surface: &str) -> bool {
    matches!(surface, "\"" | "'" | "”" | "’" | ")" | "]" | "}" | "»")
}

pub fn completeness_feature(sentence: &[TaggedToken]) -> f64 {
    let starts = sentence
        .iter()
        .find_map(|t| t.surface.chars().find(|c| c.is_alphanumeric()))
        .is_some_and(|c| c.is_uppercase());
    let ends = sentence
        .iter()
        .rev()
        .find(|t| !is_closer(&t.surface))
        .is_some_and(|t| is_terminal(&t.surface));
    if starts && ends {
        1.0
    } else {
        0.0
    }
}

fn in_family(token: &TaggedToken, family: &WordFamily) -> bool {
    LexicalUnit::from_token(token).is_some_and(|u| family.contains(&u))
}

/// GDEX-style score of `sentence` as context for `family`, reported against
/// `target`.
pub fn score_sentence(
    sentence: &[TaggedToken],
    sentence_id: usize,
    target: &LexicalUnit,
    family: &WordFamily,
    vocab: &Vocab<'_>,
    weights: &GdexWeights,
) -> Result<SentenceScore> {
    let words: Vec<&TaggedToken> = sentence.iter().filter(|t| t.is_word()).collect();
    let hits: Vec<usize> = words
        .iter()
        .enumerate()
        .filter(|(_, t)| in_family(t, family))
        .map(|(i, _)| i)
        .collect();
    if hits.is_empty() {
        return Err(Error::TargetAbsent(target.to_string()));
    }
    let n = words.len();

    let context: Vec<&&TaggedToken> = words.iter().filter(|t| !in_family(t, family)).collect();
    let known = if context.is_empty() {
        1.0
    } else {
        context.iter().filter(|t| vocab.is_known(t)).count() as f64 / context.len() as f64
    };
    let pronoun = if words
        .iter()
        .any(|t| PRONOUNS.contains(&t.surface.to_lowercase().as_str()))
    {
        0.0
    } else {
        1.0
    };
    let tail = ((n as f64) * weights.tail_fraction).round() as usize;
    let position = if hits.iter().any(|&i| i + tail >= n) { 0.0 } else { 1.0 };

    let feature_values = BTreeMap::from([
        ("length".to_string(), length_feature(n, weights)),
        ("known_words".to_string(), known),
        ("pronoun".to_string(), pronoun),
        ("completeness".to_string(), completeness_feature(sentence)),
        ("position".to_string(), position),
    ]);
    Ok(SentenceScore {
        sentence_id,
        target: target.clone(),
        score: combine(&feature_values, weights),
        feature_values,
    })
}

// ---------------------------------------------------------------------------
// Text rendering

fn attaches_left(surface: &str) -> bool {
    matches!(
        surface,
        "," | "." | ";" | ":" | "!" | "?" | "..." | "…" | ")" | "]" | "}" | "%" | "”" | "’" | "n't"
    ) || (surface.starts_with('\'') && surface.len() > 1 && surface[1..].chars().all(char::is_alphabetic))
        || (surface.starts_with('’') && surface.chars().count() > 1)
}

fn attaches_right(surface: &str) -> bool {
    matches!(surface, "(" | "[" | "{" | "“" | "‘" | "$")
}

/// Joins tokens into display text. Tokens at positions in `gaps` are
/// rendered as the gap marker; returns the text and the byte spans of those
/// markers in order.
pub fn render(surfaces: &[&str], gaps: &[usize]) -> (String, Vec<Range<usize>>) {
    let mut text = String::new();
    let mut spans = Vec::new();
    let mut quotes_seen = 0;
    let mut glue_next = false;
    for (i, s) in surfaces.iter().enumerate() {
        let mut left = attaches_left(s);
        let mut right = attaches_right(s);
        if *s == "\"" {
            let opening = if i == 0 {
                true
            } else if i + 1 == surfaces.len() {
                false
            } else {
                quotes_seen % 2 == 0
            };
            quotes_seen += 1;
            left = !opening;
            right = opening;
        }
        if i > 0 && !left && !glue_next {
            text.push(' ');
        }
        if gaps.contains(&i) {
            let start = text.len();
            text.push_str(GAP_MARKER);
            spans.push(start..text.len());
        } else {
            text.push_str(s);
        }
        glue_next = right;
    }
    (text, spans)
}

pub fn sentence_text(sentence: &[TaggedToken]) -> String {
    let surfaces: Vec<&str> = sentence.iter().map(|t| t.surface.as_str()).collect();
    render(&surfaces, &[]).0
}

/// Fills the gap spans of `text` with `answers`, in order.
pub fn fill_gaps(text: &str, spans: &[Range<usize>], answers: &[String]) -> Option<String> {
    if spans.len() != answers.len() {
        return None;
    }
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for (span, answer) in spans.iter().zip(answers) {
        if span.start < last || text.get(span.clone()) != Some(GAP_MARKER) {
            return None;
        }
        out.push_str(&text[last..span.start]);
        out.push_str(answer);
        last = span.end;
    }
    out.push_str(&text[last..]);
    Some(out)
}

// ---------------------------------------------------------------------------
// Distractors

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistractorSource {
    SecondNeighbor,
    ThirdNeighbor,
    Distant,
    Frequency,
}

impl DistractorSource {
    pub fn is_fallback(self) -> bool {
        self != DistractorSource::SecondNeighbor
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distractor {
    pub unit: LexicalUnit,
    pub family: Option<FamilyId>,
    pub source: DistractorSource,
}

/// Best product of edge weights over shortest paths from `source`.
fn path_strength(graph: &FamilyGraph, dist: &[Option<usize>], source: FamilyId) -> Vec<f64> {
    let mut order: Vec<usize> = (0..dist.len()).filter(|&i| dist[i].is_some()).collect();
    order.sort_by_key(|&i| dist[i]);
    let mut best = vec![0.0; dist.len()];
    best[source.index()] = 1.0;
    for u in order {
        let du = dist[u].expect("filtered to reachable");
        for &(v, w) in graph.neighbors(FamilyId(u as u32)) {
            if dist[v.index()] == Some(du + 1) {
                best[v.index()] = f64::max(best[v.index()], best[u] * w);
            }
        }
    }
    best
}

pub struct DistractorRequest<'a> {
    pub graph: &'a FamilyGraph,
    pub families: &'a FamilySet,
    /// Book-wide (lemma, POS) frequencies for the last-resort fallback.
    pub book_frequencies: &'a HashMap<LexicalUnit, usize>,
    pub stopwords: &'a HashSet<String>,
}

/// Same-POS distractors for `target`: second neighbors ranked by path
/// strength, then third neighbors, then any non-neighbor family, then book
/// units drawn by frequency.
pub fn select_distractors(
    req: &DistractorRequest<'_>,
    target: FamilyId,
    pos: Pos,
    count: usize,
    rng: &mut ChaCha8Rng,
    exclude_lemmas: &HashSet<String>,
) -> Result<Vec<Distractor>> {
    let graph = req.graph;
    if !graph.contains(target) {
        return Err(Error::UnknownNode(target));
    }
    let dist = graph.hop_distances(target);
    let strength = path_strength(graph, &dist, target);
    let mut used: HashSet<String> = exclude_lemmas.clone();
    let mut chosen: Vec<Distractor> = Vec::with_capacity(count);

    let candidate = |f: &WordFamily| f.member_with_pos(pos).cloned();
    let take_families =
        |ids: Vec<FamilyId>, source: DistractorSource, chosen: &mut Vec<Distractor>, used: &mut HashSet<String>| {
            for id in ids {
                if chosen.len() >= count {
                    break;
                }
                let Some(unit) = req.families.get(id).and_then(candidate) else {
                    continue;
                };
                if used.insert(unit.lemma.clone()) {
                    chosen.push(Distractor {
                        unit,
                        family: Some(id),
                        source,
                    });
                }
            }
        };

    for (hops, source) in [
        (2, DistractorSource::SecondNeighbor),
        (3, DistractorSource::ThirdNeighbor),
    ] {
        let mut ids: Vec<FamilyId> = graph.nodes().filter(|f| dist[f.index()] == Some(hops)).collect();
        ids.sort_by(|a, b| strength[b.index()].total_cmp(&strength[a.index()]).then(a.cmp(b)));
        take_families(ids, source, &mut chosen, &mut used);
    }
    if chosen.len() < count {
        let mut ids: Vec<FamilyId> = graph
            .nodes()
            .filter(|f| dist[f.index()].is_none_or(|d| d >= 4))
            .collect();
        ids.sort_by_key(|f| (dist[f.index()].unwrap_or(usize::MAX), *f));
        take_families(ids, DistractorSource::Distant, &mut chosen, &mut used);
    }
    if chosen.len() < count {
        let near: HashSet<FamilyId> = graph
            .nodes()
            .filter(|f| dist[f.index()].is_some_and(|d| d <= 1))
            .collect();
        let mut pool: Vec<(&LexicalUnit, usize)> = req
            .book_frequencies
            .iter()
            .filter(|(u, _)| u.pos == pos && !used.contains(&u.lemma) && !req.stopwords.contains(&u.lemma))
            .filter(|(u, _)| req.families.family_of(u).is_none_or(|f| !near.contains(&f)))
            .map(|(u, &n)| (u, n))
            .collect();
        pool.sort();
        while chosen.len() < count && !pool.is_empty() {
            let weights = WeightedIndex::new(pool.iter().map(|(_, n)| *n)).expect("positive frequencies");
            let (unit, _) = pool.swap_remove(weights.sample(rng));
            if used.insert(unit.lemma.clone()) {
                chosen.push(Distractor {
                    unit: unit.clone(),
                    family: req.families.family_of(unit),
                    source: DistractorSource::Frequency,
                });
            }
        }
    }
    if chosen.len() < count {
        return Err(Error::InsufficientDistractors {
            pos: pos.to_string(),
            needed: count,
            available: chosen.len(),
        });
    }
    Ok(chosen)
}

// ---------------------------------------------------------------------------
// Activities

/// Appends an inflectional ending with the usual spelling adjustments.
pub fn inflect(lemma: &str, suffix: &str) -> String {
    let ends_cons_y = lemma.len() > 1
        && lemma.ends_with('y')
        && !matches!(lemma.as_bytes()[lemma.len() - 2], b'a' | b'e' | b'i' | b'o' | b'u');
    match suffix {
        "s" | "es" => {
            if ends_cons_y {
                format!("{}ies", &lemma[..lemma.len() - 1])
            } else if ["s", "x", "z", "ch", "sh"].iter().any(|e| lemma.ends_with(e)) {
                format!("{lemma}es")
            } else {
                format!("{lemma}s")
            }
        }
        "ed" | "er" | "est" => {
            if ends_cons_y {
                format!("{}i{suffix}", &lemma[..lemma.len() - 1])
            } else if lemma.ends_with('e') {
                format!("{lemma}{}", &suffix[1..])
            } else {
                format!("{lemma}{suffix}")
            }
        }
        "ing" => {
            if lemma.ends_with('e') && !lemma.ends_with("ee") && lemma.len() > 2 {
                format!("{}ing", &lemma[..lemma.len() - 1])
            } else {
                format!("{lemma}ing")
            }
        }
        _ => lemma.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct Aid {
    pub option: String,
    pub dictionary: String,
    pub translation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AidTemplates {
    pub dictionary: String,
    pub translation: String,
}

impl Default for AidTemplates {
    fn default() -> Self {
        AidTemplates {
            dictionary: "https://en.wiktionary.org/wiki/{word}".into(),
            translation: "https://translate.google.com/?sl=en&op=translate&text={word}".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct ActivityItem {
    pub sentence_id: usize,
    pub text_with_gap_markers: String,
    pub gap_spans: Vec<Range<usize>>,
}

/// What a client is allowed to see.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct ActivityView {
    pub activity_id: String,
    pub mode: Mode,
    pub items: Vec<ActivityItem>,
    pub options: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub aids: Option<Vec<Aid>>,
}

/// Full activity including the answer; never sent to clients as is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Activity {
    pub view: ActivityView,
    pub target_family: FamilyId,
    pub target_unit: LexicalUnit,
    pub answer_token: String,
    /// The unit behind each option, aligned with `view.options`.
    pub option_units: Vec<LexicalUnit>,
    pub distractors: Vec<Distractor>,
    /// Original surface at each gap, per item.
    pub gap_answers: Vec<Vec<String>>,
    pub sentence_scores: Vec<SentenceScore>,
}

impl Activity {
    pub fn client_view(&self) -> &ActivityView {
        &self.view
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedResponse {
    pub activity_id: String,
    pub chosen: String,
    pub chosen_unit: LexicalUnit,
    pub correct: bool,
    pub r: i8,
}

pub fn grade(activity: &Activity, chosen: &str) -> Result<GradedResponse> {
    let idx = activity
        .view
        .options
        .iter()
        .position(|o| o == chosen)
        .ok_or_else(|| Error::InvalidChoice(chosen.to_string()))?;
    let unit = activity.option_units[idx].clone();
    let correct = unit == activity.target_unit;
    Ok(GradedResponse {
        activity_id: activity.view.activity_id.clone(),
        chosen: chosen.to_string(),
        chosen_unit: unit,
        correct,
        r: if correct { 1 } else { -1 },
    })
}

/// Read-only book artifacts an activity is generated from.
pub struct Book<'a> {
    pub corpus: &'a TaggedCorpus,
    pub targets: &'a TargetIndex,
    pub families: &'a FamilySet,
    pub graph: &'a FamilyGraph,
    pub book_frequencies: &'a HashMap<LexicalUnit, usize>,
    pub stopwords: &'a HashSet<String>,
}

pub struct ActivitySettings<'a> {
    pub weights: &'a GdexWeights,
    pub known_threshold: f64,
    pub aids: &'a AidTemplates,
    pub seed: u64,
}

fn activity_id(seed: u64, family: FamilyId) -> String {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(family.0.to_le_bytes());
    hex::encode(&h.finalize()[..8])
}

/// The family member with most occurrences in the book.
pub fn target_unit(family: &WordFamily, targets: &TargetIndex) -> LexicalUnit {
    family
        .units()
        .max_by(|a, b| targets.frequency(a).cmp(&targets.frequency(b)).then(b.cmp(a)))
        .cloned()
        .expect("families are non-empty")
}

pub fn generate_activity(
    book: &Book<'_>,
    model: &LearnerModel,
    target: FamilyId,
    mode: Mode,
    settings: &ActivitySettings<'_>,
) -> Result<Activity> {
    let family = book.families.get(target).ok_or(Error::UnknownNode(target))?;
    let unit = target_unit(family, book.targets);
    let vocab = Vocab {
        families: book.families,
        model,
        stopwords: book.stopwords,
        known_threshold: settings.known_threshold,
    };

    // sentences with the target unit first, then other members if short
    let mut sentence_ids: Vec<usize> = book.targets.occurrences(&unit).iter().map(|o| o.sentence).collect();
    sentence_ids.dedup();
    if sentence_ids.len() < MIN_SENTENCES {
        let mut more: Vec<usize> = family
            .units()
            .flat_map(|u| book.targets.occurrences(u).iter().map(|o| o.sentence))
            .collect();
        more.sort_unstable();
        more.dedup();
        sentence_ids = more;
    }
    let mut seen_text = HashSet::new();
    let mut scored: Vec<SentenceScore> = Vec::new();
    for sid in sentence_ids {
        let sentence = &book.corpus.sentences[sid];
        if !seen_text.insert(sentence_text(sentence)) {
            continue;
        }
        scored.push(score_sentence(sentence, sid, &unit, family, &vocab, settings.weights)?);
    }
    if scored.len() < MIN_SENTENCES {
        return Err(Error::InsufficientContext {
            family: target,
            sentences: scored.len(),
        });
    }
    scored.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.sentence_id.cmp(&b.sentence_id)));
    let take = if scored.iter().filter(|s| s.score > 0.5).count() >= 6 {
        4
    } else {
        3
    };
    scored.truncate(take);

    let mut items = Vec::with_capacity(take);
    let mut gap_answers = Vec::with_capacity(take);
    let mut gap_surfaces: Vec<(LexicalUnit, String)> = Vec::new();
    for s in &scored {
        let sentence = &book.corpus.sentences[s.sentence_id];
        let gaps: Vec<usize> = sentence
            .iter()
            .enumerate()
            .filter(|(_, t)| in_family(t, family))
            .map(|(i, _)| i)
            .collect();
        let surfaces: Vec<&str> = sentence.iter().map(|t| t.surface.as_str()).collect();
        let (text, spans) = render(&surfaces, &gaps);
        let answers: Vec<String> = gaps.iter().map(|&i| sentence[i].surface.clone()).collect();
        for &i in &gaps {
            let t = &sentence[i];
            gap_surfaces.push((
                LexicalUnit::from_token(t).expect("gapped tokens are units"),
                t.surface.to_lowercase(),
            ));
        }
        items.push(ActivityItem {
            sentence_id: s.sentence_id,
            text_with_gap_markers: text,
            gap_spans: spans,
        });
        gap_answers.push(answers);
    }

    // inflection shared by every gap, when all gaps are the target unit
    let shared_suffix = {
        let suffixes: HashSet<Option<&str>> = gap_surfaces
            .iter()
            .map(|(u, s)| {
                if *u == unit {
                    inflection_suffix(&unit.lemma, s).or((s == &unit.lemma).then_some(""))
                } else {
                    None
                }
            })
            .collect();
        match suffixes.into_iter().collect::<Vec<_>>().as_slice() {
            [Some(sfx)] if !sfx.is_empty() => Some(sfx.to_string()),
            _ => None,
        }
    };
    let display = |lemma: &str| match &shared_suffix {
        Some(sfx) => inflect(lemma, sfx),
        None => lemma.to_string(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed ^ (u64::from(target.0) << 32));
    let req = DistractorRequest {
        graph: book.graph,
        families: book.families,
        book_frequencies: book.book_frequencies,
        stopwords: book.stopwords,
    };
    let exclude: HashSet<String> = family.units().map(|u| u.lemma.clone()).collect();
    let distractors = select_distractors(&req, target, unit.pos, DISTRACTOR_COUNT, &mut rng, &exclude)?;

    let answer_token = if shared_suffix.is_some() {
        gap_surfaces[0].1.clone()
    } else {
        unit.lemma.clone()
    };
    let mut options: Vec<(String, LexicalUnit)> = vec![(answer_token.clone(), unit.clone())];
    for d in &distractors {
        let mut text = display(&d.unit.lemma);
        if options.iter().any(|(o, _)| *o == text) {
            text = d.unit.lemma.clone();
        }
        options.push((text, d.unit.clone()));
    }
    options.shuffle(&mut rng);

    let aids = (mode == Mode::Learning).then(|| {
        options
            .iter()
            .map(|(o, _)| Aid {
                option: o.clone(),
                dictionary: settings.aids.dictionary.replace("{word}", o),
                translation: settings.aids.translation.replace("{word}", o),
            })
            .collect()
    });
    let (option_texts, option_units): (Vec<String>, Vec<LexicalUnit>) = options.into_iter().unzip();

    Ok(Activity {
        view: ActivityView {
            activity_id: activity_id(settings.seed, target),
            mode,
            items,
            options: option_texts,
            aids,
        },
        target_family: target,
        target_unit: unit,
        answer_token,
        option_units,
        distractors,
        gap_answers,
        sentence_scores: scored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner_model::UpdateParams;
    use crate::morphology::FamilyMember;
    use crate::semantics::{Edge, GraphParams};

    fn tokens(text: &str) -> Vec<TaggedToken> {
        text.split(' ')
            .map(|w| {
                let (surface, pos) = match w.split_once('/') {
                    Some((s, p)) => (s, p.parse().unwrap()),
                    None => (w, Pos::Other),
                };
                TaggedToken {
                    surface: surface.to_string(),
                    lemma: surface.to_lowercase(),
                    pos,
                    sentence_id: 0,
                }
            })
            .collect()
    }

    fn single_family(lemma: &str, pos: Pos) -> WordFamily {
        let unit = LexicalUnit::new(lemma, pos).unwrap();
        WordFamily {
            id: FamilyId(0),
            base: lemma.into(),
            representative: unit.clone(),
            members: vec![FamilyMember {
                unit,
                level: 1,
                forms: vec![lemma.into()],
            }],
        }
    }

    struct Fixture {
        families: FamilySet,
        model: LearnerModel,
        stopwords: HashSet<String>,
    }

    fn fixture() -> Fixture {
        let families = FamilySet::new("b", 6, vec![single_family("whale", Pos::Noun)]);
        let graph = FamilyGraph::from_edges("b", GraphParams::default(), 1, []).unwrap();
        Fixture {
            families,
            model: LearnerModel::new(&graph, "l", UpdateParams::default()),
            stopwords: ["the", "a", "of", "and", "she", "was", "in", "on"]
                .map(String::from)
                .into(),
        }
    }

    fn score(fx: &Fixture, text: &str) -> SentenceScore {
        let vocab = Vocab {
            families: &fx.families,
            model: &fx.model,
            stopwords: &fx.stopwords,
            known_threshold: 0.5,
        };
        let fam = fx.families.get(FamilyId(0)).unwrap();
        score_sentence(
            &tokens(text),
            0,
            &fam.representative,
            fam,
            &vocab,
            &GdexWeights::default(),
        )
        .unwrap()
    }

    const BASE: &str = "The whale/NOUN was in the sea and the ship was on the sea and the whale/NOUN .";

    #[test]
    fn ideal_sentence_scores_one() {
        let s = score(
            &fixture(),
            "The whale/NOUN was in the water of the bay and the ship was in the bay .",
        );
        assert_eq!(s.feature_values["length"], 1.0);
        assert_eq!(s.feature_values["pronoun"], 1.0);
        assert_eq!(s.feature_values["completeness"], 1.0);
        assert_eq!(s.feature_values["position"], 1.0);
        assert_eq!(s.score, 1.0);
    }

    #[test]
    fn pronoun_costs_its_weight() {
        let fx = fixture();
        let a = score(
            &fx,
            "The whale/NOUN was in the water of the bay and the ship was in the bay .",
        );
        let b = score(
            &fx,
            "The whale/NOUN was in the water of the bay and she was in the bay .",
        );
        assert!((a.score - b.score - 0.15).abs() < 1e-12);
        assert!((b.recompute(&GdexWeights::default()) - b.score).abs() < 1e-15);
    }

    #[test]
    fn fragment_has_no_length_or_completeness() {
        let s = score(&fixture(), "the whale/NOUN swims");
        assert_eq!(s.feature_values["length"], 0.0);
        assert_eq!(s.feature_values["completeness"], 0.0);
    }

    #[test]
    fn late_target_and_absent_target() {
        let s = score(&fixture(), BASE);
        assert_eq!(s.feature_values["position"], 0.0);
        let fx = fixture();
        let vocab = Vocab {
            families: &fx.families,
            model: &fx.model,
            stopwords: &fx.stopwords,
            known_threshold: 0.5,
        };
        let fam = fx.families.get(FamilyId(0)).unwrap();
        let err = score_sentence(
            &tokens("No fish ."),
            0,
            &fam.representative,
            fam,
            &vocab,
            &GdexWeights::default(),
        );
        assert!(matches!(err, Err(Error::TargetAbsent(_))));
    }

    #[test]
    fn unknown_content_lowers_known_words() {
        let s = score(&fixture(), "The whale/NOUN ate/VERB the fish/NOUN .");
        assert_eq!(s.feature_values["known_words"], 0.5);
    }

    #[test]
    fn length_feature_shape() {
        let w = GdexWeights::default();
        assert_eq!(length_feature(4, &w), 0.0);
        assert_eq!(length_feature(7, &w), 0.5);
        assert_eq!(length_feature(10, &w), 1.0);
        assert_eq!(length_feature(25, &w), 1.0);
        assert_eq!(length_feature(50, &w), 0.0);
    }

    #[test]
    fn rendering_and_gaps() {
        let s = [
            "\"", "It", "'s", "the", "whale", ",", "\"", "said", "he", "(", "quietly", ")", ".",
        ];
        let (text, _) = render(&s, &[]);
        assert_eq!(text, "\"It's the whale,\" said he (quietly).");
        let (gapped, spans) = render(&s, &[4]);
        assert_eq!(gapped, "\"It's the ____,\" said he (quietly).");
        assert_eq!(&gapped[spans[0].clone()], GAP_MARKER);
        assert_eq!(fill_gaps(&gapped, &spans, &["whale".into()]).unwrap(), text);
        assert!(fill_gaps(&gapped, &spans, &[]).is_none());
    }

    #[test]
    fn inflection_spelling() {
        assert_eq!(inflect("ship", "s"), "ships");
        assert_eq!(inflect("box", "s"), "boxes");
        assert_eq!(inflect("city", "s"), "cities");
        assert_eq!(inflect("hope", "ed"), "hoped");
        assert_eq!(inflect("carry", "ed"), "carried");
        assert_eq!(inflect("hope", "ing"), "hoping");
        assert_eq!(inflect("see", "ing"), "seeing");
    }

    fn graph(n: usize, edges: &[(u32, u32, f64)]) -> FamilyGraph {
        FamilyGraph::from_edges(
            "b",
            GraphParams::default(),
            n,
            edges.iter().map(|&(a, b, weight)| Edge {
                a: FamilyId(a),
                b: FamilyId(b),
                weight,
            }),
        )
        .unwrap()
    }

    fn families(spec: &[(&str, Pos)]) -> FamilySet {
        let fams = spec
            .iter()
            .enumerate()
            .map(|(i, &(l, p))| {
                let mut f = single_family(l, p);
                f.id = FamilyId(i as u32);
                f
            })
            .collect();
        FamilySet::new("b", 6, fams)
    }

    fn pick(g: &FamilyGraph, fs: &FamilySet, target: u32, pos: Pos, count: usize) -> Result<Vec<Distractor>> {
        let freqs = HashMap::new();
        let stop = HashSet::new();
        let req = DistractorRequest {
            graph: g,
            families: fs,
            book_frequencies: &freqs,
            stopwords: &stop,
        };
        select_distractors(
            &req,
            FamilyId(target),
            pos,
            count,
            &mut ChaCha8Rng::seed_from_u64(1),
            &HashSet::new(),
        )
    }

    #[test]
    fn path_second_neighbor_only() {
        let g = graph(4, &[(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5)]);
        let fs = families(&[
            ("tee", Pos::Noun),
            ("aaa", Pos::Noun),
            ("bbb", Pos::Noun),
            ("ccc", Pos::Noun),
        ]);
        let d = pick(&g, &fs, 0, Pos::Noun, 1).unwrap();
        assert_eq!(d[0].family, Some(FamilyId(2)));
        assert_eq!(d[0].source, DistractorSource::SecondNeighbor);
        let d = pick(&g, &fs, 0, Pos::Noun, 2).unwrap();
        assert_eq!(d[1].family, Some(FamilyId(3)));
        assert!(pick(&g, &fs, 0, Pos::Noun, 3).is_err());
    }

    #[test]
    fn same_pos_second_neighbors_ranked_by_strength() {
        // 0 - 1 (hub) - {2 verb, 3, 4, 5 nouns}; 6 is a direct neighbor
        let g = graph(
            7,
            &[
                (0, 1, 0.9),
                (1, 2, 0.9),
                (1, 3, 0.4),
                (1, 4, 0.6),
                (1, 5, 0.5),
                (0, 6, 0.3),
            ],
        );
        let fs = families(&[
            ("target", Pos::Noun),
            ("hub", Pos::Noun),
            ("verb", Pos::Verb),
            ("nthree", Pos::Noun),
            ("nfour", Pos::Noun),
            ("nfive", Pos::Noun),
            ("near", Pos::Noun),
        ]);
        let d = pick(&g, &fs, 0, Pos::Noun, 3).unwrap();
        let ids: Vec<_> = d.iter().map(|x| x.family.unwrap().0).collect();
        assert_eq!(ids, vec![4, 5, 3]);
        assert!(d.iter().all(|x| !x.source.is_fallback()));
    }

    #[test]
    fn frequency_fallback_and_insufficient() {
        let g = graph(2, &[(0, 1, 0.5)]);
        let fs = families(&[("target", Pos::Noun), ("near", Pos::Noun)]);
        let freqs: HashMap<LexicalUnit, usize> = [("rope", 3), ("sail", 9), ("deck", 1), ("near", 50)]
            .iter()
            .map(|&(l, n)| (LexicalUnit::new(l, Pos::Noun).unwrap(), n))
            .collect();
        let stop = HashSet::new();
        let req = DistractorRequest {
            graph: &g,
            families: &fs,
            book_frequencies: &freqs,
            stopwords: &stop,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = select_distractors(&req, FamilyId(0), Pos::Noun, 3, &mut rng, &HashSet::new()).unwrap();
        let mut lemmas: Vec<_> = d.iter().map(|x| x.unit.lemma.as_str()).collect();
        lemmas.sort();
        assert_eq!(lemmas, vec!["deck", "rope", "sail"]);
        assert!(d.iter().all(|x| x.source == DistractorSource::Frequency));
        let err = select_distractors(&req, FamilyId(0), Pos::Verb, 3, &mut rng, &HashSet::new());
        assert!(matches!(err, Err(Error::InsufficientDistractors { available: 0, .. })));
    }

    #[test]
    fn grading() {
        let unit = |l: &str| LexicalUnit::new(l, Pos::Noun).unwrap();
        let activity = Activity {
            view: ActivityView {
                activity_id: "a".into(),
                mode: Mode::Testing,
                items: vec![],
                options: vec!["rope".into(), "whale".into(), "sail".into(), "deck".into()],
                aids: None,
            },
            target_family: FamilyId(0),
            target_unit: unit("whale"),
            answer_token: "whale".into(),
            option_units: ["rope", "whale", "sail", "deck"].map(unit).to_vec(),
            distractors: vec![],
            gap_answers: vec![],
            sentence_scores: vec![],
        };
        let g = grade(&activity, "whale").unwrap();
        assert!(g.correct && g.r == 1);
        let g = grade(&activity, "sail").unwrap();
        assert!(!g.correct && g.r == -1);
        assert!(matches!(grade(&activity, "mast"), Err(Error::InvalidChoice(_))));
        let json = serde_json::to_value(activity.client_view()).unwrap();
        assert!(json.get("answer_token").is_none());
        assert!(json.get("aids").is_none());
    }
}
