//! Collection, topic and relevance-judgment readers, plus the shared token
//! normalization used by both the index and the POS statistics.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};

use crate::error::{Error, Result};
use crate::tagger::{CoarseTag, CollapseMap, TagSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub docno: String,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub surface: String,
    pub tag: CoarseTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedDocument {
    pub docno: String,
    pub tokens: Vec<TaggedToken>,
}

impl TaggedDocument {
    pub fn new(
        docno: impl Into<String>,
        tokens: impl IntoIterator<Item = (String, CoarseTag)>,
    ) -> Self {
        Self {
            docno: docno.into(),
            tokens: tokens
                .into_iter()
                .map(|(surface, tag)| TaggedToken { surface, tag })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub qid: String,
    pub terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QrelEntry {
    pub qid: String,
    pub docno: String,
    pub relevance: i32,
}

/// Splits on Unicode whitespace and trims non-alphanumeric characters from
/// both ends of each piece. Empty pieces are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|piece| piece.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|piece| !piece.is_empty())
        .map(str::to_string)
        .collect()
}

/// Token normalization. Lowercasing always; English Snowball stemming when enabled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Normalizer {
    pub stem: bool,
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

impl Normalizer {
    pub fn new(stem: bool) -> Self {
        Self { stem }
    }

    pub fn normalize(&self, token: &str) -> String {
        let lower = token.to_lowercase();
        if self.stem && !lower.is_empty() {
            stemmer().stem(&lower).into_owned()
        } else {
            lower
        }
    }

    /// Normalized index term for a token, or `None` for tokens that carry no
    /// alphanumeric character (punctuation). Such tokens still occupy POS window slots.
    pub fn term(&self, token: &str) -> Option<String> {
        if token.chars().any(char::is_alphanumeric) {
            Some(self.normalize(token))
        } else {
            None
        }
    }

    pub fn label(&self) -> &'static str {
        if self.stem {
            "lower+stem"
        } else {
            "lower"
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "lower" => Some(Self { stem: false }),
            "lower+stem" => Some(Self { stem: true }),
            _ => None,
        }
    }
}

/// Lowercasing without stemming.
pub fn normalize(token: &str) -> String {
    Normalizer::default().normalize(token)
}

fn to_utf8(input: &[u8]) -> Result<&str> {
    std::str::from_utf8(input).map_err(|e| Error::ParseAt {
        offset: e.valid_up_to(),
        message: "invalid UTF-8".into(),
    })
}

fn find_from(haystack: &str, needle: &str, from: usize) -> Option<usize> {
    haystack[from..].find(needle).map(|i| i + from)
}

fn strip_markup(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_tag = false;
    for c in text.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => {
                in_tag = false;
                out.push(' ');
            }
            _ if !in_tag => out.push(c),
            _ => {}
        }
    }
    out.replace("&amp;", "&")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&apos;", "'")
}

/// Reads a concatenation of TREC `<DOC>` blocks.
pub fn parse_trec_sgml(input: &[u8]) -> Result<Vec<RawDocument>> {
    const DOC: &str = "<DOC>";
    const DOC_END: &str = "</DOC>";
    const DOCNO: &str = "<DOCNO>";
    const DOCNO_END: &str = "</DOCNO>";
    const TEXT: &str = "<TEXT>";
    const TEXT_END: &str = "</TEXT>";

    let src = to_utf8(input)?;
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    let mut pos = 0;
    loop {
        let Some(start) = find_from(src, DOC, pos) else {
            if let Some(off) = src[pos..].find(|c: char| !c.is_whitespace()) {
                return Err(Error::ParseAt {
                    offset: pos + off,
                    message: "content outside <DOC> block".into(),
                });
            }
            break;
        };
        if let Some(off) = src[pos..start].find(|c: char| !c.is_whitespace()) {
            return Err(Error::ParseAt {
                offset: pos + off,
                message: "content outside <DOC> block".into(),
            });
        }
        let body_start = start + DOC.len();
        let end = find_from(src, DOC_END, body_start).ok_or_else(|| Error::ParseAt {
            offset: start,
            message: "unclosed <DOC>".into(),
        })?;
        if let Some(nested) = find_from(&src[..end], DOC, body_start) {
            return Err(Error::ParseAt {
                offset: start,
                message: format!("<DOC> not closed before next <DOC> at byte {nested}"),
            });
        }
        let body = &src[body_start..end];

        let docno_at = body.find(DOCNO).ok_or_else(|| Error::ParseAt {
            offset: start,
            message: "missing <DOCNO>".into(),
        })?;
        let docno_from = docno_at + DOCNO.len();
        let docno_to = find_from(body, DOCNO_END, docno_from).ok_or_else(|| Error::ParseAt {
            offset: body_start + docno_at,
            message: "unclosed <DOCNO>".into(),
        })?;
        if find_from(body, DOCNO, docno_to).is_some() {
            return Err(Error::ParseAt {
                offset: start,
                message: "more than one <DOCNO>".into(),
            });
        }
        let docno = body[docno_from..docno_to].trim().to_string();
        if docno.is_empty() {
            return Err(Error::ParseAt {
                offset: body_start + docno_at,
                message: "empty <DOCNO>".into(),
            });
        }

        let mut tokens = Vec::new();
        let mut cursor = 0;
        while let Some(t) = find_from(body, TEXT, cursor) {
            let from = t + TEXT.len();
            let to = find_from(body, TEXT_END, from).ok_or_else(|| Error::ParseAt {
                offset: body_start + t,
                message: "unclosed <TEXT>".into(),
            })?;
            tokens.extend(tokenize(&strip_markup(&body[from..to])));
            cursor = to + TEXT_END.len();
        }

        if !seen.insert(docno.clone()) {
            return Err(Error::DuplicateDocno(docno));
        }
        docs.push(RawDocument { docno, tokens });
        pos = end + DOC_END.len();
    }
    Ok(docs)
}

/// What to do with a tag that is neither a coarse category nor in the collapse map.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum UnknownTagPolicy {
    Error,
    #[default]
    MapToOther,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaggedCorpus {
    pub docs: Vec<TaggedDocument>,
    /// Unmapped fine tags and how often each was collapsed to `OTHER`.
    pub unknown_tags: BTreeMap<String, u64>,
}

/// Reads the tagged-corpus format: `#DOC <docno>` header lines followed by
/// `surface<TAB>tag` lines. Blank lines are ignored.
pub fn parse_tagged(
    input: &[u8],
    map: &CollapseMap,
    policy: UnknownTagPolicy,
) -> Result<TaggedCorpus> {
    let src = to_utf8(input)?;
    let mut out = TaggedCorpus::default();
    let mut seen = HashSet::new();
    let mut current: Option<TaggedDocument> = None;
    for (i, line) in src.lines().enumerate() {
        let lineno = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with("#DOC") && !line.contains('\t') {
            let docno = line["#DOC".len()..].trim();
            if docno.is_empty() || !line["#DOC".len()..].starts_with(char::is_whitespace) {
                return Err(Error::ParseLine {
                    line: lineno,
                    message: "expected `#DOC <docno>`".into(),
                });
            }
            if !seen.insert(docno.to_string()) {
                return Err(Error::DuplicateDocno(docno.to_string()));
            }
            if let Some(doc) = current.take() {
                out.docs.push(doc);
            }
            current = Some(TaggedDocument {
                docno: docno.to_string(),
                tokens: Vec::new(),
            });
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(surface), Some(fine), None) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::ParseLine {
                line: lineno,
                message: "expected surface<TAB>tag".into(),
            });
        };
        if surface.is_empty() || fine.is_empty() {
            return Err(Error::ParseLine {
                line: lineno,
                message: "empty surface or tag".into(),
            });
        }
        let Some(doc) = current.as_mut() else {
            return Err(Error::ParseLine {
                line: lineno,
                message: "token line before first `#DOC` header".into(),
            });
        };
        let tag = match map.lookup(fine) {
            Some(tag) => tag,
            None => match policy {
                UnknownTagPolicy::Error => {
                    return Err(Error::UnknownTag {
                        tag: fine.to_string(),
                        line: lineno,
                    })
                }
                UnknownTagPolicy::MapToOther => {
                    *out.unknown_tags.entry(fine.to_string()).or_default() += 1;
                    map.tagset().other()
                }
            },
        };
        doc.tokens.push(TaggedToken {
            surface: surface.to_string(),
            tag,
        });
    }
    if let Some(doc) = current {
        out.docs.push(doc);
    }
    Ok(out)
}

/// Serializes documents in the tagged-corpus format with coarse tag names.
pub fn write_tagged(docs: &[TaggedDocument], tagset: &TagSet) -> String {
    let mut out = String::new();
    for doc in docs {
        out.push_str("#DOC ");
        out.push_str(&doc.docno);
        out.push('\n');
        for tok in &doc.tokens {
            out.push_str(&tok.surface);
            out.push('\t');
            out.push_str(tagset.name(tok.tag));
            out.push('\n');
        }
    }
    out
}

/// Reads `qid<TAB>title terms` lines.
pub fn parse_topics(input: &[u8], normalizer: &Normalizer) -> Result<Vec<Query>> {
    let src = to_utf8(input)?;
    let mut seen = HashSet::new();
    let mut queries = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let Some((qid, title)) = line.split_once('\t') else {
            return Err(Error::ParseLine {
                line: i + 1,
                message: "expected qid<TAB>title".into(),
            });
        };
        let qid = qid.trim();
        if qid.is_empty() {
            return Err(Error::ParseLine {
                line: i + 1,
                message: "empty query id".into(),
            });
        }
        let terms: Vec<String> = tokenize(title)
            .iter()
            .map(|t| normalizer.normalize(t))
            .collect();
        if terms.is_empty() {
            return Err(Error::ParseLine {
                line: i + 1,
                message: format!("query {qid} has no terms"),
            });
        }
        if !seen.insert(qid.to_string()) {
            return Err(Error::Duplicate(qid.to_string()));
        }
        queries.push(Query {
            qid: qid.to_string(),
            terms,
        });
    }
    Ok(queries)
}

/// Relevance judgments, keyed by query then document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, i32>>,
}

impl Qrels {
    pub fn from_entries(entries: impl IntoIterator<Item = QrelEntry>) -> Result<Self> {
        let mut judgments: BTreeMap<String, BTreeMap<String, i32>> = BTreeMap::new();
        for e in entries {
            let per_query = judgments.entry(e.qid.clone()).or_default();
            if per_query.insert(e.docno.clone(), e.relevance).is_some() {
                return Err(Error::Duplicate(format!("{} {}", e.qid, e.docno)));
            }
        }
        Ok(Self { judgments })
    }

    /// Grades of 1 and above count as relevant.
    pub fn is_relevant(&self, qid: &str, docno: &str) -> bool {
        self.judgments
            .get(qid)
            .and_then(|m| m.get(docno))
            .is_some_and(|&rel| rel >= 1)
    }

    pub fn num_relevant(&self, qid: &str) -> usize {
        self.judgments
            .get(qid)
            .map_or(0, |m| m.values().filter(|&&r| r >= 1).count())
    }

    pub fn qids(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.judgments.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }
}

/// Reads TREC qrels lines: `qid iter docno rel`.
pub fn parse_qrels(input: &[u8]) -> Result<Qrels> {
    let src = to_utf8(input)?;
    let mut entries = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let [qid, _iter, docno, rel] = fields[..] else {
            return Err(Error::ParseLine {
                line: i + 1,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        };
        let relevance = rel.parse::<i32>().map_err(|_| Error::ParseLine {
            line: i + 1,
            message: format!("relevance {rel:?} is not an integer"),
        })?;
        entries.push(QrelEntry {
            qid: qid.to_string(),
            docno: docno.to_string(),
            relevance,
        });
    }
    Qrels::from_entries(entries)
}
