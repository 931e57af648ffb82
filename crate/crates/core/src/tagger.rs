//! Coarse part-of-speech categories, fine-to-coarse tag collapsing and a
//! lexicon/suffix fallback tagger for untagged text.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Name of the catch-all category. Every tag set contains it.
pub const OTHER: &str = "OTHER";

/// The default fourteen-category inventory.
pub const DEFAULT_TAGS: [&str; 14] = [
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "PREP", "CONJ", "NUM", "INTERJ", "MODAL",
    "PARTICLE", "PUNCT", OTHER,
];

const DEFAULT_COLLAPSE_MAP: &str = include_str!("../data/collapse_penn.tsv");

/// Index of a category within its [`TagSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoarseTag(pub(crate) u8);

impl CoarseTag {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Closed, ordered inventory of coarse categories for one run.
#[derive(Clone, PartialEq, Eq)]
pub struct TagSet {
    names: Arc<[String]>,
}

impl TagSet {
    /// Builds a tag set from category names. `OTHER` is appended when missing.
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::Config(format!("invalid coarse tag name {name:?}")));
            }
            if !out.contains(&name) {
                out.push(name);
            }
        }
        if !out.iter().any(|n| n == OTHER) {
            out.push(OTHER.to_string());
        }
        if out.len() > u8::MAX as usize {
            return Err(Error::Config(format!(
                "tag set has {} categories; at most {} are supported",
                out.len(),
                u8::MAX
            )));
        }
        Ok(Self { names: out.into() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<CoarseTag> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| CoarseTag(i as u8))
    }

    pub fn other(&self) -> CoarseTag {
        self.get(OTHER).expect("tag set always contains OTHER")
    }

    pub fn name(&self, tag: CoarseTag) -> &str {
        &self.names[tag.index()]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn tags(&self) -> impl Iterator<Item = CoarseTag> {
        (0..self.names.len()).map(|i| CoarseTag(i as u8))
    }
}

impl Default for TagSet {
    fn default() -> Self {
        Self::new(DEFAULT_TAGS).expect("default tag set is valid")
    }
}

impl fmt::Debug for TagSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

/// Mapping from fine-grained tags (Penn Treebank, TreeTagger) to coarse categories.
#[derive(Debug, Clone)]
pub struct CollapseMap {
    tagset: TagSet,
    entries: HashMap<String, CoarseTag>,
}

impl CollapseMap {
    /// Parses `fine_tag<TAB>coarse_tag` lines. `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with("# ") || line == "#" {
                continue;
            }
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(fine), Some(coarse), None) if !fine.is_empty() && !coarse.is_empty() => {
                    pairs.push((fine.to_string(), coarse.trim().to_string()))
                }
                _ => {
                    return Err(Error::ParseLine {
                        line: i + 1,
                        message: "expected fine_tag<TAB>coarse_tag".into(),
                    })
                }
            }
        }
        let tagset = TagSet::new(pairs.iter().map(|(_, c)| c.clone()))?;
        let mut entries = HashMap::with_capacity(pairs.len());
        for (fine, coarse) in pairs {
            let tag = tagset.get(&coarse).expect("collected above");
            if let Some(prev) = entries.insert(fine.clone(), tag) {
                if prev != tag {
                    return Err(Error::Config(format!(
                        "fine tag {fine:?} mapped to two coarse categories"
                    )));
                }
            }
        }
        Ok(Self { tagset, entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn tagset(&self) -> &TagSet {
        &self.tagset
    }

    /// Strict lookup: coarse names map to themselves, unmapped tags give `None`.
    pub fn lookup(&self, fine_tag: &str) -> Option<CoarseTag> {
        self.entries
            .get(fine_tag)
            .copied()
            .or_else(|| self.tagset.get(fine_tag))
    }

    /// Total lookup; unmapped tags collapse to `OTHER`.
    pub fn collapse(&self, fine_tag: &str) -> CoarseTag {
        self.lookup(fine_tag).unwrap_or_else(|| self.tagset.other())
    }

    pub fn fine_tags(&self) -> impl Iterator<Item = (&str, CoarseTag)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl Default for CollapseMap {
    fn default() -> Self {
        Self::parse(DEFAULT_COLLAPSE_MAP).expect("shipped collapse map parses")
    }
}

/// Free-function form of [`CollapseMap::collapse`].
pub fn collapse(fine_tag: &str, map: &CollapseMap) -> CoarseTag {
    map.collapse(fine_tag)
}

/// Surface form to most frequent coarse tag.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, CoarseTag>,
}

impl Lexicon {
    /// Keeps, per lowercased surface, the tag seen most often. Ties go to the tag seen first.
    pub fn from_pairs<'a, I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, CoarseTag)>,
    {
        // surface -> [(tag, count, first_seen)]
        let mut counts: HashMap<String, Vec<(CoarseTag, u64, usize)>> = HashMap::new();
        for (seq, (surface, tag)) in pairs.into_iter().enumerate() {
            let slot = counts.entry(surface.to_lowercase()).or_default();
            match slot.iter_mut().find(|(t, _, _)| *t == tag) {
                Some(entry) => entry.1 += 1,
                None => slot.push((tag, 1, seq)),
            }
        }
        let entries = counts
            .into_iter()
            .map(|(surface, tags)| {
                let best = tags
                    .iter()
                    .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
                    .expect("non-empty")
                    .0;
                (surface, best)
            })
            .collect();
        Self { entries }
    }

    /// Parses `surface<TAB>coarse_tag` lines against `tagset`.
    pub fn parse(text: &str, tagset: &TagSet) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(surface), Some(tag), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::ParseLine {
                    line: i + 1,
                    message: "expected surface<TAB>coarse_tag".into(),
                });
            };
            let tag = tagset.get(tag).ok_or_else(|| Error::ParseLine {
                line: i + 1,
                message: format!("{tag:?} is not a coarse category"),
            })?;
            pairs.push((surface, tag));
        }
        Ok(Self::from_pairs(pairs))
    }

    pub fn load(path: &Path, tagset: &TagSet) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, tagset)
    }

    pub fn get(&self, surface: &str) -> Option<CoarseTag> {
        self.entries.get(&surface.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

const SUFFIX_RULES: [(&str, &str); 6] = [
    ("ly", "ADV"),
    ("ing", "VERB"),
    ("ed", "VERB"),
    ("ous", "ADJ"),
    ("ful", "ADJ"),
    ("ive", "ADJ"),
];

/// Crude tagger: lexicon hit, else suffix rule, else `NOUN`.
///
/// Categories named by the rules that are missing from `tagset` fall back to `OTHER`.
pub fn tag_fallback<S: AsRef<str>>(
    tokens: &[S],
    lexicon: &Lexicon,
    tagset: &TagSet,
) -> Vec<CoarseTag> {
    let resolve = |name: &str| tagset.get(name).unwrap_or_else(|| tagset.other());
    tokens
        .iter()
        .map(|token| {
            let token = token.as_ref();
            if let Some(tag) = lexicon.get(token) {
                return tag;
            }
            let lower = token.to_lowercase();
            SUFFIX_RULES
                .iter()
                .find(|(suffix, _)| lower.len() > suffix.len() && lower.ends_with(suffix))
                .map(|(_, name)| resolve(name))
                .unwrap_or_else(|| resolve("NOUN"))
        })
        .collect()
}
