//! Word families built by stripping graded affixes.
//!
//! Affix rules are grouped into levels 2 through 6: level 2 holds the
//! inflections, higher levels hold progressively less frequent or less regular
//! derivational affixes. A lemma that no rule applies to is its own base at
//! level 1.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingestion::{LexicalUnit, TargetIndex};
use crate::pos::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AffixKind {
    Prefix,
    Suffix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffixRule {
    pub affix: String,
    pub kind: AffixKind,
    pub level: u8,
    pub strip_to: Option<String>,
}

/// Candidate bases shorter than this are only accepted when known.
pub const MIN_UNKNOWN_BASE_LEN: usize = 4;
/// Known bases still need this many characters.
pub const MIN_KNOWN_BASE_LEN: usize = 3;

/// Words that count as attested when judging a stripped base.
pub trait Vocabulary {
    fn contains_word(&self, word: &str) -> bool;
}

impl Vocabulary for HashSet<String> {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(word)
    }
}

impl<F: Fn(&str) -> bool> Vocabulary for F {
    fn contains_word(&self, word: &str) -> bool {
        self(word)
    }
}

/// Vocabulary that knows nothing; only the length rule applies.
pub struct NoVocabulary;

impl Vocabulary for NoVocabulary {
    fn contains_word(&self, _: &str) -> bool {
        false
    }
}

/// One strip in a reduction chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub result: String,
    pub level: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub base: String,
    /// Highest level among the applied rules, 1 if none applied.
    pub level: u8,
    pub steps: Vec<ReductionStep>,
}

#[derive(Debug, Clone)]
pub struct AffixTable {
    suffixes: Vec<AffixRule>,
    prefixes: Vec<AffixRule>,
}

const DEFAULT_AFFIXES: &str = include_str!("../data/affixes.tsv");

impl Default for AffixTable {
    fn default() -> Self {
        AffixTable::parse(DEFAULT_AFFIXES).expect("bundled affix table is valid")
    }
}

impl AffixTable {
    /// Parses `level<TAB>kind<TAB>affix<TAB>strip_to?` lines. When the same
    /// affix is listed at several levels the lowest level wins.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules: BTreeMap<(AffixKind, String, Option<String>), u8> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if !(3..=4).contains(&cols.len()) {
                return Err(Error::parse(
                    line_no,
                    "expected level<TAB>kind<TAB>affix[<TAB>strip_to]",
                ));
            }
            let level: u8 = cols[0]
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad level `{}`", cols[0])))?;
            if !(2..=6).contains(&level) {
                return Err(Error::parse(line_no, format!("level {level} outside 2..=6")));
            }
            let kind = match cols[1].trim() {
                "prefix" => AffixKind::Prefix,
                "suffix" => AffixKind::Suffix,
                other => return Err(Error::parse(line_no, format!("bad affix kind `{other}`"))),
            };
            let affix = cols[2].trim().to_lowercase();
            if affix.is_empty() {
                return Err(Error::parse(line_no, "empty affix"));
            }
            let strip_to = cols.get(3).map(|s| s.trim().to_lowercase()).filter(|s| !s.is_empty());
            if strip_to.as_ref().is_some_and(|s| s.len() >= affix.len()) {
                return Err(Error::parse(line_no, "replacement must be shorter than the affix"));
            }
            let slot = rules.entry((kind, affix, strip_to)).or_insert(level);
            *slot = (*slot).min(level);
        }
        let mut suffixes = Vec::new();
        let mut prefixes = Vec::new();
        for ((kind, affix, strip_to), level) in rules {
            let rule = AffixRule {
                affix,
                kind,
                level,
                strip_to,
            };
            match kind {
                AffixKind::Suffix => suffixes.push(rule),
                AffixKind::Prefix => prefixes.push(rule),
            }
        }
        // longest affix first, then lower level, then alphabetical
        let order = |a: &AffixRule, b: &AffixRule| {
            b.affix
                .len()
                .cmp(&a.affix.len())
                .then(a.level.cmp(&b.level))
                .then(a.affix.cmp(&b.affix))
                .then(a.strip_to.cmp(&b.strip_to))
        };
        suffixes.sort_by(order);
        prefixes.sort_by(order);
        Ok(AffixTable { suffixes, prefixes })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn rules(&self) -> impl Iterator<Item = &AffixRule> {
        self.suffixes.iter().chain(&self.prefixes)
    }

    /// Strips affixes until none applies: suffixes are tried before prefixes,
    /// longest affix first. A strip is taken only if its base is attested in
    /// `known` or is at least [`MIN_UNKNOWN_BASE_LEN`] characters long.
    pub fn reduce(&self, lemma: &str, known: &dyn Vocabulary) -> Reduction {
        let mut current = lemma.to_string();
        let mut steps = Vec::new();
        let mut seen = HashSet::from([current.clone()]);
        while let Some(step) = self.strip_once(&current, known) {
            if !seen.insert(step.result.clone()) {
                break;
            }
            current = step.result.clone();
            steps.push(step);
        }
        let level = steps.iter().map(|s| s.level).max().unwrap_or(1);
        Reduction {
            base: current,
            level,
            steps,
        }
    }

    /// Like [`reduce`](Self::reduce) but stops before the first strip whose
    /// rule lies above `level_cap`.
    pub fn reduce_capped(&self, lemma: &str, level_cap: u8, known: &dyn Vocabulary) -> Reduction {
        let mut full = self.reduce(lemma, known);
        if let Some(cut) = full.steps.iter().position(|s| s.level > level_cap) {
            full.steps.truncate(cut);
            full.base = full
                .steps
                .last()
                .map(|s| s.result.clone())
                .unwrap_or_else(|| lemma.to_string());
            full.level = full.steps.iter().map(|s| s.level).max().unwrap_or(1);
        }
        full
    }

    fn strip_once(&self, word: &str, known: &dyn Vocabulary) -> Option<ReductionStep> {
        for rule in &self.suffixes {
            if let Some(base) = apply_suffix(word, rule, known) {
                return Some(ReductionStep {
                    result: base,
                    level: rule.level,
                });
            }
        }
        for rule in &self.prefixes {
            if let Some(base) = apply_prefix(word, rule, known) {
                return Some(ReductionStep {
                    result: base,
                    level: rule.level,
                });
            }
        }
        None
    }

    /// Undoes one inflection appropriate to `pos`; used to lemmatize raw text.
    pub fn inflection_base(&self, word: &str, pos: Pos, known: &dyn Vocabulary) -> String {
        let allowed: &[&str] = match pos {
            Pos::Noun => &["s", "es", "ies", "'s"],
            Pos::Verb => &["s", "es", "ies", "ed", "ied", "ing"],
            Pos::Adj => &["er", "est", "ier", "iest"],
            _ => &[],
        };
        self.suffixes
            .iter()
            .filter(|r| r.level == 2 && allowed.contains(&r.affix.as_str()))
            .find_map(|r| apply_suffix(word, r, known))
            .unwrap_or_else(|| word.to_string())
    }
}

/// Reduces `lemma` with `table` and no vocabulary, returning (base, level).
pub fn reduce_to_base(lemma: &str, table: &AffixTable) -> (String, u8) {
    let r = table.reduce(lemma, &NoVocabulary);
    (r.base, r.level)
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn accept(candidate: &str, known: &dyn Vocabulary) -> bool {
    let len = candidate.chars().count();
    (len >= MIN_KNOWN_BASE_LEN && known.contains_word(candidate)) || len >= MIN_UNKNOWN_BASE_LEN
}

fn suffix_guard(affix: &str, stem: &str) -> bool {
    match affix {
        // plural/3sg -s never follows s ("glass", "bus")
        "s" | "'s" => !stem.ends_with('s') || affix == "'s",
        "es" => ["s", "x", "z", "ch", "sh", "o"].iter().any(|e| stem.ends_with(e)),
        _ => true,
    }
}

fn apply_suffix(word: &str, rule: &AffixRule, known: &dyn Vocabulary) -> Option<String> {
    let stem = word.strip_suffix(rule.affix.as_str())?;
    if stem.is_empty() || !stem.chars().any(char::is_alphabetic) || !suffix_guard(&rule.affix, stem) {
        return None;
    }
    if let Some(replacement) = &rule.strip_to {
        let candidate = format!("{stem}{replacement}");
        return accept(&candidate, known).then_some(candidate);
    }
    // Orthographic repair: consonant doubling ("running") and a dropped
    // final e ("hoping") only apply before vowel-initial suffixes.
    let vowel_initial = rule.affix.chars().next().is_some_and(is_vowel);
    let chars: Vec<char> = stem.chars().collect();
    let doubled = vowel_initial
        && chars.len() >= 3
        && chars[chars.len() - 1] == chars[chars.len() - 2]
        && !is_vowel(chars[chars.len() - 1])
        && !matches!(chars[chars.len() - 1], 'l' | 's' | 'f' | 'z');
    let mut candidates: Vec<String> = Vec::with_capacity(3);
    if doubled {
        candidates.push(chars[..chars.len() - 1].iter().collect());
    }
    candidates.push(stem.to_string());
    let restored = (vowel_initial && !stem.ends_with('e')).then(|| format!("{stem}e"));
    // Attested candidates win; otherwise fall back to the length rule, which
    // never applies to the e-restored form or to one-letter derivational
    // suffixes ("happy" is not "happ" + "y").
    let length_rule = rule.level == 2 || rule.affix.chars().count() > 1;
    candidates
        .iter()
        .chain(restored.iter())
        .find(|c| c.chars().count() >= MIN_KNOWN_BASE_LEN && known.contains_word(c))
        .or_else(|| {
            candidates
                .iter()
                .find(|c| length_rule && c.chars().count() >= MIN_UNKNOWN_BASE_LEN)
        })
        .cloned()
}

fn apply_prefix(word: &str, rule: &AffixRule, known: &dyn Vocabulary) -> Option<String> {
    let rest = word.strip_prefix(rule.affix.as_str())?;
    let rest = rest.strip_prefix('-').unwrap_or(rest);
    if rest.is_empty() || !rest.chars().next().is_some_and(char::is_alphabetic) {
        return None;
    }
    let candidate = match &rule.strip_to {
        Some(r) => format!("{r}{rest}"),
        None => rest.to_string(),
    };
    accept(&candidate, known).then_some(candidate)
}

// ---------------------------------------------------------------------------
// Families

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(transparent)]
pub struct FamilyId(pub u32);

impl FamilyId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for FamilyId {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(FamilyId)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub unit: LexicalUnit,
    /// Level at which the member joins the family; the base itself is 1.
    pub level: u8,
    /// Lowercased surface forms observed in the book.
    #[serde(default)]
    pub forms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordFamily {
    pub id: FamilyId,
    pub base: String,
    pub representative: LexicalUnit,
    /// Sorted by unit.
    pub members: Vec<FamilyMember>,
}

impl WordFamily {
    pub fn contains(&self, unit: &LexicalUnit) -> bool {
        self.members.binary_search_by(|m| m.unit.cmp(unit)).is_ok()
    }

    pub fn units(&self) -> impl Iterator<Item = &LexicalUnit> {
        self.members.iter().map(|m| &m.unit)
    }

    pub fn member_level(&self, unit: &LexicalUnit) -> Option<u8> {
        self.members.iter().find(|m| &m.unit == unit).map(|m| m.level)
    }

    /// A member with the given tag: the representative when it matches,
    /// otherwise the shortest such lemma.
    pub fn member_with_pos(&self, pos: Pos) -> Option<&LexicalUnit> {
        if self.representative.pos == pos {
            return Some(&self.representative);
        }
        self.units()
            .filter(|u| u.pos == pos)
            .min_by(|a, b| a.lemma.len().cmp(&b.lemma.len()).then(a.cmp(b)))
    }

    pub fn has_pos(&self, pos: Pos) -> bool {
        self.units().any(|u| u.pos == pos)
    }
}

/// Families indexed by id, ids dense from 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "FamilySetFile", into = "FamilySetFile")]
pub struct FamilySet {
    pub book_id: String,
    pub level_cap: u8,
    families: Vec<WordFamily>,
    by_unit: HashMap<LexicalUnit, FamilyId>,
}

#[derive(Serialize, Deserialize)]
struct FamilySetFile {
    book_id: String,
    level_cap: u8,
    families: Vec<WordFamily>,
}

impl From<FamilySetFile> for FamilySet {
    fn from(f: FamilySetFile) -> Self {
        FamilySet::new(f.book_id, f.level_cap, f.families)
    }
}

impl From<FamilySet> for FamilySetFile {
    fn from(s: FamilySet) -> Self {
        FamilySetFile {
            book_id: s.book_id,
            level_cap: s.level_cap,
            families: s.families,
        }
    }
}

impl FamilySet {
    /// `families[i].id` must equal `i`.
    pub fn new(book_id: impl Into<String>, level_cap: u8, families: Vec<WordFamily>) -> Self {
        debug_assert!(families.iter().enumerate().all(|(i, f)| f.id.index() == i));
        let by_unit = families
            .iter()
            .flat_map(|f| f.units().map(move |u| (u.clone(), f.id)))
            .collect();
        FamilySet {
            book_id: book_id.into(),
            level_cap,
            families,
            by_unit,
        }
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    pub fn get(&self, id: FamilyId) -> Option<&WordFamily> {
        self.families.get(id.index())
    }

    pub fn iter(&self) -> impl Iterator<Item = &WordFamily> {
        self.families.iter()
    }

    pub fn as_slice(&self) -> &[WordFamily] {
        &self.families
    }

    pub fn family_of(&self, unit: &LexicalUnit) -> Option<FamilyId> {
        self.by_unit.get(unit).copied()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Groups targets whose lemmas reduce to the same base. A stripped base is
/// attested when it is a target lemma or, if given, a `vocabulary` word.
pub fn build_families(
    targets: &TargetIndex,
    table: &AffixTable,
    level_cap: u8,
    vocabulary: Option<&dyn Vocabulary>,
) -> FamilySet {
    let lemmas: HashSet<&str> = targets.units().map(|u| u.lemma.as_str()).collect();
    let known = |w: &str| lemmas.contains(w) || vocabulary.is_some_and(|v| v.contains_word(w));

    let mut by_base: BTreeMap<String, Vec<(LexicalUnit, u8)>> = BTreeMap::new();
    let mut cache: HashMap<&str, Reduction> = HashMap::new();
    for unit in targets.units() {
        let reduction = cache
            .entry(unit.lemma.as_str())
            .or_insert_with(|| table.reduce_capped(&unit.lemma, level_cap, &known));
        by_base
            .entry(reduction.base.clone())
            .or_default()
            .push((unit.clone(), reduction.level));
    }

    let families = by_base
        .into_iter()
        .enumerate()
        .map(|(i, (base, members))| {
            let representative = members
                .iter()
                .map(|(u, _)| u)
                .filter(|u| u.lemma == base)
                .min()
                .or_else(|| {
                    members
                        .iter()
                        .map(|(u, _)| u)
                        .min_by(|a, b| a.lemma.len().cmp(&b.lemma.len()).then(a.cmp(b)))
                })
                .cloned()
                .expect("a base always has members");
            let mut members: Vec<FamilyMember> = members
                .into_iter()
                .map(|(unit, level)| FamilyMember {
                    level: if unit.lemma == base { 1 } else { level },
                    forms: targets.forms(&unit).map(str::to_string).collect(),
                    unit,
                })
                .collect();
            members.sort_by(|a, b| a.unit.cmp(&b.unit));
            WordFamily {
                id: FamilyId(i as u32),
                base,
                representative,
                members,
            }
        })
        .collect();
    FamilySet::new(targets.book_id.clone(), level_cap, families)
}

/// Forms a regular inflection takes when the surface is `lemma` + one of
/// these endings.
const INFLECTIONS: &[&str] = &["s", "es", "ed", "ing", "er", "est"];

/// The plain-concatenation inflection relating `surface` to `lemma`, if any.
pub fn inflection_suffix<'a>(lemma: &str, surface: &'a str) -> Option<&'a str> {
    let rest = surface.strip_prefix(lemma)?;
    INFLECTIONS.contains(&rest).then_some(rest)
}
