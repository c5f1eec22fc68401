//! Tagged corpora and learning-target extraction.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::morphology::AffixTable;
use crate::pos::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
    pub sentence_id: usize,
}

impl TaggedToken {
    /// Punctuation and symbols carry no letters or digits.
    pub fn is_word(&self) -> bool {
        self.surface.chars().any(char::is_alphanumeric)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedCorpus {
    pub book_id: String,
    pub sentences: Vec<Vec<TaggedToken>>,
}

impl TaggedCorpus {
    /// Builds a corpus from (surface, lemma, pos) triples, assigning sentence ids.
    pub fn from_sentences<I, S>(book_id: impl Into<String>, sentences: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = (String, String, Pos)>,
    {
        let sentences = sentences
            .into_iter()
            .enumerate()
            .map(|(sentence_id, tokens)| {
                tokens
                    .into_iter()
                    .map(|(surface, lemma, pos)| TaggedToken {
                        surface,
                        lemma,
                        pos,
                        sentence_id,
                    })
                    .collect()
            })
            .collect();
        TaggedCorpus {
            book_id: book_id.into(),
            sentences,
        }
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &TaggedToken> {
        self.sentences.iter().flatten()
    }

    /// Number of distinct (lemma, POS) types over word tokens.
    pub fn distinct_types(&self) -> usize {
        self.tokens()
            .filter(|t| t.is_word())
            .map(|t| (t.lemma.to_lowercase(), t.pos))
            .collect::<HashSet<_>>()
            .len()
    }

    /// Occurrence count per lexical unit, over every token that forms a valid unit.
    pub fn unit_frequencies(&self) -> HashMap<LexicalUnit, usize> {
        let mut freq = HashMap::new();
        for unit in self.tokens().filter_map(LexicalUnit::from_token) {
            *freq.entry(unit).or_insert(0) += 1;
        }
        freq
    }
}

/// Stable identifier derived from content bytes.
pub fn content_id(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(&digest[..8])
}

/// A (lemma, POS) pair. The same lemma under two tags is two units.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct LexicalUnit {
    pub lemma: String,
    pub pos: Pos,
}

impl LexicalUnit {
    pub fn new(lemma: &str, pos: Pos) -> Result<Self> {
        let lemma = lemma.to_lowercase();
        if !valid_lemma(&lemma) {
            return Err(Error::InvalidParameter(format!("`{lemma}` is not a valid lemma")));
        }
        Ok(LexicalUnit { lemma, pos })
    }

    /// The unit a token contributes, if its lemma is a usable word.
    pub fn from_token(token: &TaggedToken) -> Option<Self> {
        let lemma = token.lemma.to_lowercase();
        valid_lemma(&lemma).then_some(LexicalUnit { lemma, pos: token.pos })
    }
}

fn valid_lemma(lemma: &str) -> bool {
    !lemma.is_empty() && !lemma.chars().any(char::is_whitespace) && lemma.chars().any(char::is_alphabetic)
}

impl fmt::Display for LexicalUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.lemma, self.pos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Occurrence {
    pub sentence: usize,
    pub position: usize,
}

/// Occurrences and observed surface forms of one learning target.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TargetEntry {
    pub occurrences: Vec<Occurrence>,
    pub forms: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "TargetIndexFile", try_from = "TargetIndexFile")]
pub struct TargetIndex {
    pub book_id: String,
    pub min_frequency: usize,
    /// Distinct (lemma, POS) types over all word tokens of the corpus.
    pub distinct_types: usize,
    pub targets: BTreeMap<LexicalUnit, TargetEntry>,
}

impl TargetIndex {
    pub fn units(&self) -> impl Iterator<Item = &LexicalUnit> {
        self.targets.keys()
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn contains(&self, unit: &LexicalUnit) -> bool {
        self.targets.contains_key(unit)
    }

    pub fn occurrences(&self, unit: &LexicalUnit) -> &[Occurrence] {
        self.targets.get(unit).map(|e| e.occurrences.as_slice()).unwrap_or(&[])
    }

    pub fn frequency(&self, unit: &LexicalUnit) -> usize {
        self.occurrences(unit).len()
    }

    /// Lowercased surface forms seen for `unit`.
    pub fn forms(&self, unit: &LexicalUnit) -> impl Iterator<Item = &str> {
        self.targets
            .get(unit)
            .into_iter()
            .flat_map(|e| e.forms.iter().map(String::as_str))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct TargetIndexFile {
    book_id: String,
    min_frequency: usize,
    distinct_types: usize,
    targets: Vec<TargetRecord>,
}

#[derive(Serialize, Deserialize)]
struct TargetRecord {
    lemma: String,
    pos: Pos,
    forms: Vec<String>,
    occurrences: Vec<(usize, usize)>,
}

impl From<TargetIndex> for TargetIndexFile {
    fn from(index: TargetIndex) -> Self {
        TargetIndexFile {
            book_id: index.book_id,
            min_frequency: index.min_frequency,
            distinct_types: index.distinct_types,
            targets: index
                .targets
                .into_iter()
                .map(|(unit, entry)| TargetRecord {
                    lemma: unit.lemma,
                    pos: unit.pos,
                    forms: entry.forms.into_iter().collect(),
                    occurrences: entry
                        .occurrences
                        .into_iter()
                        .map(|o| (o.sentence, o.position))
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<TargetIndexFile> for TargetIndex {
    type Error = Error;

    fn try_from(file: TargetIndexFile) -> Result<Self> {
        let mut targets = BTreeMap::new();
        for record in file.targets {
            let unit = LexicalUnit::new(&record.lemma, record.pos)?;
            let entry = TargetEntry {
                occurrences: record
                    .occurrences
                    .into_iter()
                    .map(|(sentence, position)| Occurrence { sentence, position })
                    .collect(),
                forms: record.forms.into_iter().collect(),
            };
            targets.insert(unit, entry);
        }
        Ok(TargetIndex {
            book_id: file.book_id,
            min_frequency: file.min_frequency,
            distinct_types: file.distinct_types,
            targets,
        })
    }
}

/// Returns the units with at least `min_frequency` occurrences whose lemma is
/// not a stopword and whose tag is an open class (proper nouns excluded).
pub fn extract_targets(
    corpus: &TaggedCorpus,
    stopwords: &HashSet<String>,
    min_frequency: usize,
) -> Result<TargetIndex> {
    if min_frequency == 0 {
        return Err(Error::InvalidParameter("min_frequency must be >= 1".into()));
    }
    let mut all: BTreeMap<LexicalUnit, TargetEntry> = BTreeMap::new();
    for (sentence, tokens) in corpus.sentences.iter().enumerate() {
        for (position, token) in tokens.iter().enumerate() {
            if !token.pos.is_content() {
                continue;
            }
            let Some(unit) = LexicalUnit::from_token(token) else {
                continue;
            };
            if stopwords.contains(&unit.lemma) {
                continue;
            }
            let entry = all.entry(unit).or_default();
            entry.occurrences.push(Occurrence { sentence, position });
            entry.forms.insert(token.surface.to_lowercase());
        }
    }
    all.retain(|_, e| e.occurrences.len() >= min_frequency);
    Ok(TargetIndex {
        book_id: corpus.book_id.clone(),
        min_frequency,
        distinct_types: corpus.distinct_types(),
        targets: all,
    })
}

// ---------------------------------------------------------------------------
// Stopwords

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// The bundled English stopword list.
pub fn default_stopwords() -> HashSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: impl AsRef<Path>) -> Result<HashSet<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

// ---------------------------------------------------------------------------
// Pre-tagged format: `surface<TAB>lemma<TAB>POS`, blank line between sentences.

pub fn load_pretagged(path: impl AsRef<Path>) -> Result<TaggedCorpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pretagged(&text, content_id(text.as_bytes()))
}

pub fn parse_pretagged(text: &str, book_id: impl Into<String>) -> Result<TaggedCorpus> {
    let mut sentences: Vec<Vec<TaggedToken>> = Vec::new();
    let mut current = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(surface), Some(lemma), Some(tag), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
            return Err(Error::parse(line_no, "expected surface<TAB>lemma<TAB>POS"));
        };
        if surface.is_empty() || lemma.is_empty() {
            return Err(Error::parse(line_no, "empty surface or lemma column"));
        }
        let pos = Pos::from_tag(tag.trim()).ok_or_else(|| Error::parse(line_no, format!("unknown POS tag `{tag}`")))?;
        current.push(TaggedToken {
            surface: surface.to_string(),
            lemma: lemma.to_string(),
            pos,
            sentence_id: sentences.len(),
        });
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    if sentences.is_empty() {
        return Err(Error::EmptyText);
    }
    Ok(TaggedCorpus {
        book_id: book_id.into(),
        sentences,
    })
}

pub fn export_pretagged(corpus: &TaggedCorpus) -> String {
    let mut out = String::with_capacity(corpus.token_count() * 16);
    for (i, sentence) in corpus.sentences.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for t in sentence {
            out.push_str(&t.surface);
            out.push('\t');
            out.push_str(&t.lemma);
            out.push('\t');
            out.push_str(t.pos.as_str());
            out.push('\n');
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Raw text

/// Assigns a lemma and coarse tag to every token of one sentence.
pub trait Tagger {
    fn tag(&self, tokens: &[&str]) -> Vec<(String, Pos)>;
}

/// Segments `raw_text` into sentences and tokens and tags them with `tagger`.
pub fn tokenize_and_tag(raw_text: &str, tagger: &dyn Tagger) -> Result<TaggedCorpus> {
    if raw_text.trim().is_empty() {
        return Err(Error::EmptyText);
    }
    let book_id = content_id(raw_text.as_bytes());
    let sentences = split_sentences(raw_text).into_iter().map(|tokens| {
        let tags = tagger.tag(&tokens);
        tokens
            .iter()
            .zip(tags)
            .map(|(surface, (lemma, pos))| (surface.to_string(), lemma, pos))
            .collect::<Vec<_>>()
    });
    let corpus = TaggedCorpus::from_sentences(book_id, sentences);
    if corpus.sentences.is_empty() {
        return Err(Error::EmptyText);
    }
    Ok(corpus)
}

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "st", "capt", "col", "gen", "lt", "prof", "rev", "sr", "jr", "vs", "etc", "no",
];

/// Splits text into sentences of tokens. Words keep inner apostrophes and
/// hyphens; every other non-space character is its own token. A sentence ends
/// after `.`, `!` or `?` (plus directly following closing quotes or brackets)
/// unless the
/// period follows a known abbreviation.
pub fn split_sentences(text: &str) -> Vec<Vec<&str>> {
    let tokens = tokenize(text);
    let offset = |t: &str| t.as_ptr() as usize - text.as_ptr() as usize;
    let mut sentences = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let tok = tokens[i];
        current.push(tok);
        let terminal = matches!(tok, "." | "!" | "?");
        let abbreviation = tok == "."
            && current.len() >= 2
            && ABBREVIATIONS.contains(&current[current.len() - 2].to_lowercase().as_str());
        if terminal && !abbreviation {
            while i + 1 < tokens.len()
                && matches!(tokens[i + 1], "\"" | "'" | ")" | "]" | "”" | "’")
                && offset(tokens[i + 1]) == offset(tokens[i]) + tokens[i].len()
            {
                i += 1;
                current.push(tokens[i]);
            }
            sentences.push(std::mem::take(&mut current));
        }
        i += 1;
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

fn tokenize(text: &str) -> Vec<&str> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if c.is_alphanumeric() {
            let mut end = start + c.len_utf8();
            while let Some(&(i, n)) = chars.peek() {
                let joiner = matches!(n, '\'' | '’' | '-');
                if n.is_alphanumeric() {
                    end = i + n.len_utf8();
                    chars.next();
                } else if joiner {
                    // Only keep the joiner when a letter follows it.
                    let rest = &text[i + n.len_utf8()..];
                    if rest.chars().next().is_some_and(char::is_alphanumeric) {
                        end = i + n.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                } else {
                    break;
                }
            }
            tokens.push(&text[start..end]);
        } else {
            tokens.push(&text[start..start + c.len_utf8()]);
        }
    }
    tokens
}

const LEXICON: &str = include_str!("../data/lexicon.tsv");

const SUBJECT_PRONOUNS: &[&str] = &["i", "you", "he", "she", "it", "we", "they", "who"];
const VERB_TRIGGERS: &[&str] = &[
    "to", "can", "could", "may", "might", "must", "shall", "should", "will", "would", "did", "does", "do",
];
const NOUN_TRIGGERS: &[&str] = &[
    "the", "a", "an", "my", "your", "his", "her", "its", "our", "their", "this", "that", "these", "those", "some",
    "every", "each", "no",
];

/// Deterministic tagger built from a small lexicon, suffix heuristics and two
/// context rules. Unknown words default to NOUN.
pub struct LexiconTagger {
    lexicon: HashMap<String, (Pos, String)>,
    affixes: AffixTable,
}

impl Default for LexiconTagger {
    fn default() -> Self {
        Self::new(AffixTable::default())
    }
}

impl LexiconTagger {
    pub fn new(affixes: AffixTable) -> Self {
        let lexicon = LEXICON
            .lines()
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|l| {
                let mut cols = l.split('\t');
                let form = cols.next()?;
                let pos: Pos = cols.next()?.parse().ok()?;
                let lemma = cols.next().unwrap_or(form);
                Some((form.to_string(), (pos, lemma.to_string())))
            })
            .collect();
        LexiconTagger { lexicon, affixes }
    }

    fn is_known(&self, word: &str) -> bool {
        self.lexicon.contains_key(word)
    }

    fn guess(&self, word: &str, prev: Option<&str>, prev_pos: Option<Pos>) -> Pos {
        let after_subject = prev.is_some_and(|p| SUBJECT_PRONOUNS.contains(&p));
        // singular noun followed by an -s form: "the cat sleeps"
        let third_person = prev_pos == Some(Pos::Noun)
            && prev.is_some_and(|p| !p.ends_with('s'))
            && word.ends_with('s')
            && !word.ends_with("ss");
        let after_verb_trigger = prev.is_some_and(|p| VERB_TRIGGERS.contains(&p));
        let after_determiner = prev.is_some_and(|p| NOUN_TRIGGERS.contains(&p));
        if after_subject || after_verb_trigger || third_person {
            return Pos::Verb;
        }
        let by_suffix = suffix_pos(word);
        match by_suffix {
            Some(Pos::Verb) if after_determiner => Pos::Noun,
            Some(p) => p,
            None => Pos::Noun,
        }
    }
}

fn suffix_pos(word: &str) -> Option<Pos> {
    const RULES: &[(&str, Pos)] = &[
        ("ly", Pos::Adv),
        ("ness", Pos::Noun),
        ("ment", Pos::Noun),
        ("tion", Pos::Noun),
        ("sion", Pos::Noun),
        ("ity", Pos::Noun),
        ("ship", Pos::Noun),
        ("hood", Pos::Noun),
        ("ism", Pos::Noun),
        ("ous", Pos::Adj),
        ("ful", Pos::Adj),
        ("less", Pos::Adj),
        ("able", Pos::Adj),
        ("ible", Pos::Adj),
        ("ive", Pos::Adj),
        ("ical", Pos::Adj),
        ("ish", Pos::Adj),
        ("est", Pos::Adj),
        ("ize", Pos::Verb),
        ("ise", Pos::Verb),
        ("ify", Pos::Verb),
        ("ed", Pos::Verb),
        ("ing", Pos::Verb),
    ];
    RULES
        .iter()
        .find(|(suffix, _)| word.len() > suffix.len() + 2 && word.ends_with(suffix))
        .map(|&(_, pos)| pos)
}

impl Tagger for LexiconTagger {
    fn tag(&self, tokens: &[&str]) -> Vec<(String, Pos)> {
        let mut out = Vec::with_capacity(tokens.len());
        let mut prev: Option<String> = None;
        let mut prev_pos: Option<Pos> = None;
        let mut sentence_start = true;
        for tok in tokens {
            let lower = tok.to_lowercase();
            let is_word = tok.chars().any(char::is_alphabetic);
            let tagged = if !is_word {
                (lower.clone(), Pos::Other)
            } else if let Some((pos, lemma)) = self.lexicon.get(&lower) {
                (lemma.clone(), *pos)
            } else if !sentence_start && tok.chars().next().is_some_and(char::is_uppercase) {
                (lower.clone(), Pos::Propn)
            } else {
                let pos = self.guess(&lower, prev.as_deref(), prev_pos);
                let lemma = self.affixes.inflection_base(&lower, pos, &|w: &str| self.is_known(w));
                (lemma, pos)
            };
            if tok.chars().any(char::is_alphanumeric) {
                sentence_start = false;
                prev = Some(lower);
                prev_pos = Some(tagged.1);
            } else if !matches!(*tok, "\"" | "'" | "“" | "‘" | "(") {
                prev = None;
                prev_pos = None;
            }
            out.push(tagged);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(lemma: &str, pos: Pos) -> LexicalUnit {
        LexicalUnit::new(lemma, pos).unwrap()
    }

    #[test]
    fn two_sentences_with_repeated_noun() {
        let corpus = tokenize_and_tag("The cat sleeps. The cat dreams.", &LexiconTagger::default()).unwrap();
        assert_eq!(corpus.sentences.len(), 2);
        let cats: Vec<_> = corpus
            .tokens()
            .filter(|t| t.surface == "cat")
            .map(|t| (t.lemma.as_str(), t.pos))
            .collect();
        assert_eq!(cats, vec![("cat", Pos::Noun), ("cat", Pos::Noun)]);
        // hand annotation of the full fixture
        let tags: Vec<_> = corpus.tokens().map(|t| (t.lemma.as_str(), t.pos)).collect();
        assert_eq!(
            tags,
            vec![
                ("the", Pos::Other),
                ("cat", Pos::Noun),
                ("sleep", Pos::Verb),
                (".", Pos::Other),
                ("the", Pos::Other),
                ("cat", Pos::Noun),
                ("dream", Pos::Verb),
                (".", Pos::Other),
            ]
        );
        for (i, s) in corpus.sentences.iter().enumerate() {
            assert!(s.iter().all(|t| t.sentence_id == i));
        }
    }

    #[test]
    fn empty_text_is_rejected() {
        let err = tokenize_and_tag("", &LexiconTagger::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyText));
        assert!(matches!(
            tokenize_and_tag("  \n ", &LexiconTagger::default()),
            Err(Error::EmptyText)
        ));
    }

    #[test]
    fn homograph_minimal_pair() {
        let tagger = LexiconTagger::default();
        let a = tokenize_and_tag("Dreams fade.", &tagger).unwrap();
        let b = tokenize_and_tag("She dreams.", &tagger).unwrap();
        assert_eq!(a.sentences[0][0].pos, Pos::Noun);
        assert_eq!(a.sentences[0][0].lemma, "dream");
        assert_eq!(b.sentences[0][1].pos, Pos::Verb);
        assert_eq!(b.sentences[0][1].lemma, "dream");
    }

    #[test]
    fn sentence_splitting_keeps_abbreviations_and_quotes() {
        let s = split_sentences("Mr. Smith left. \"Go!\" she said. It's well-known");
        assert_eq!(s.len(), 4);
        assert_eq!(s[0], vec!["Mr", ".", "Smith", "left", "."]);
        assert_eq!(s[1], vec!["\"", "Go", "!", "\""]);
        assert_eq!(s[3], vec!["It's", "well-known"]);
    }

    #[test]
    fn pretagged_single_sentence() {
        let corpus = parse_pretagged("the\tthe\tOTHER\ncat\tcat\tNOUN\n.\t.\tOTHER\n\n", "b").unwrap();
        assert_eq!(corpus.sentences.len(), 1);
        assert_eq!(corpus.sentences[0].len(), 3);
        assert_eq!(corpus.sentences[0][1].pos, Pos::Noun);
    }

    #[test]
    fn pretagged_missing_column_reports_line() {
        let err = parse_pretagged("cat NOUN\n", "b").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_pretagged("a\ta\tDET\n\nb\tb\tWHAT\n", "b").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn pretagged_maps_fine_tags() {
        let corpus = parse_pretagged("ships\tship\tNNS\nsailed\tsail\tVBD\n", "b").unwrap();
        let tags: Vec<_> = corpus.tokens().map(|t| t.pos).collect();
        assert_eq!(tags, vec![Pos::Noun, Pos::Verb]);
    }

    #[test]
    fn export_then_parse_is_identity() {
        let corpus = tokenize_and_tag(
            "The sailors watched the sea. Nobody slept that night!",
            &LexiconTagger::default(),
        )
        .unwrap();
        let back = parse_pretagged(&export_pretagged(&corpus), corpus.book_id.clone()).unwrap();
        assert_eq!(back, corpus);
    }

    fn corpus_of(words: &[(&str, Pos)]) -> TaggedCorpus {
        TaggedCorpus::from_sentences("t", words.iter().map(|&(w, p)| vec![(w.to_string(), w.to_string(), p)]))
    }

    #[test]
    fn frequency_threshold_boundary() {
        let mut words = vec![("the", Pos::Other); 7];
        words.extend([("dream", Pos::Verb); 5]);
        words.extend([("dream", Pos::Noun); 2]);
        let stop = HashSet::from(["the".to_string()]);
        let index = extract_targets(&corpus_of(&words), &stop, 5).unwrap();
        let units: Vec<_> = index.units().cloned().collect();
        assert_eq!(units, vec![unit("dream", Pos::Verb)]);
        assert_eq!(index.frequency(&unit("dream", Pos::Verb)), 5);
    }

    #[test]
    fn only_stopwords_gives_empty_index() {
        let words = vec![("the", Pos::Noun); 10];
        let stop = HashSet::from(["the".to_string()]);
        assert!(extract_targets(&corpus_of(&words), &stop, 1).unwrap().is_empty());
    }

    #[test]
    fn proper_nouns_and_function_words_are_not_targets() {
        let mut words = vec![("nemo", Pos::Propn); 6];
        words.extend([("42", Pos::Other); 6]);
        words.extend([("whale", Pos::Noun); 6]);
        let index = extract_targets(&corpus_of(&words), &HashSet::new(), 5).unwrap();
        assert_eq!(index.len(), 1);
    }

    #[test]
    fn zero_min_frequency_is_invalid() {
        let corpus = corpus_of(&[("whale", Pos::Noun)]);
        assert!(extract_targets(&corpus, &HashSet::new(), 0).is_err());
    }

    #[test]
    fn index_json_round_trip() {
        let words = vec![("whale", Pos::Noun); 6];
        let index = extract_targets(&corpus_of(&words), &HashSet::new(), 5).unwrap();
        let json = serde_json::to_string(&index).unwrap();
        let back: TargetIndex = serde_json::from_str(&json).unwrap();
        assert_eq!(back, index);
    }

    #[test]
    fn default_stopwords_cover_function_words() {
        let stop = default_stopwords();
        assert!(stop.len() > 250);
        for w in ["the", "and", "she", "of"] {
            assert!(stop.contains(w), "{w}");
        }
        assert!(!stop.contains("whale"));
    }
}
