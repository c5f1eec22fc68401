//! Coarse part-of-speech tags.
//!
//! Fine tags from external taggers (Universal Dependencies or Penn Treebank)
//! are mapped down through `data/tagmap.tsv`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Propn,
    Other,
}

impl Pos {
    pub const ALL: [Pos; 6] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv, Pos::Propn, Pos::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Propn => "PROPN",
            Pos::Other => "OTHER",
        }
    }

    /// Open-class tags that can become learning targets.
    pub fn is_content(self) -> bool {
        matches!(self, Pos::Noun | Pos::Verb | Pos::Adj | Pos::Adv)
    }

    /// Maps a coarse or fine tag to its coarse tag, `None` if the tag is unknown.
    pub fn from_tag(tag: &str) -> Option<Pos> {
        tag_table().get(tag).copied()
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown coarse tag `{s}`"))
    }
}

const TAG_MAP: &str = include_str!("../data/tagmap.tsv");

fn tag_table() -> &'static HashMap<&'static str, Pos> {
    static TABLE: OnceLock<HashMap<&'static str, Pos>> = OnceLock::new();
    TABLE.get_or_init(|| {
        TAG_MAP
            .lines()
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|l| {
                let (fine, coarse) = l.split_once('\t')?;
                Some((fine, coarse.parse().expect("tagmap.tsv holds coarse tags")))
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fine_tags_map_down() {
        assert_eq!(Pos::from_tag("NNS"), Some(Pos::Noun));
        assert_eq!(Pos::from_tag("VBD"), Some(Pos::Verb));
        assert_eq!(Pos::from_tag("PRON"), Some(Pos::Other));
        assert_eq!(Pos::from_tag("ADJ"), Some(Pos::Adj));
        assert_eq!(Pos::from_tag("BOGUS"), None);
    }

    #[test]
    fn coarse_tags_round_trip() {
        for p in Pos::ALL {
            assert_eq!(p.as_str().parse::<Pos>().unwrap(), p);
            assert_eq!(Pos::from_tag(p.as_str()), Some(p));
        }
    }
}
