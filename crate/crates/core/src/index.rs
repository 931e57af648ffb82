//! In-memory inverted index with the collection statistics used by the models.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::corpus::{Normalizer, RawDocument, TaggedDocument};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const FORMAT_MAGIC: &str = "posweight-index";
const FORMAT_VERSION: u32 = 1;

pub type DocId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: DocId,
    pub tf: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct TermEntry {
    postings: Vec<Posting>,
    coll_freq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvertedIndex {
    normalizer: Normalizer,
    docnos: Vec<String>,
    doc_len: Vec<u64>,
    terms: HashMap<String, TermEntry>,
    total_tokens: u64,
}

impl InvertedIndex {
    pub fn build_raw(docs: &[RawDocument], normalizer: Normalizer) -> Result<Self> {
        let mut b = IndexBuilder::new(normalizer);
        for d in docs {
            b.add_raw(d)?;
        }
        Ok(b.finish())
    }

    pub fn build_tagged(docs: &[TaggedDocument], normalizer: Normalizer) -> Result<Self> {
        let mut b = IndexBuilder::new(normalizer);
        for d in docs {
            b.add_tagged(d)?;
        }
        Ok(b.finish())
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    pub fn num_docs(&self) -> usize {
        self.docnos.len()
    }

    pub fn docno(&self, doc: DocId) -> &str {
        &self.docnos[doc as usize]
    }

    pub fn docnos(&self) -> &[String] {
        &self.docnos
    }

    pub fn doc_len(&self, doc: DocId) -> u64 {
        self.doc_len[doc as usize]
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn avg_doc_len<S: Scalar>(&self) -> S {
        if self.docnos.is_empty() {
            S::zero()
        } else {
            S::from_count(self.total_tokens) / S::from_count(self.docnos.len() as u64)
        }
    }

    pub fn vocabulary_size(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }

    /// Postings sorted by ascending doc id; empty for unknown terms.
    pub fn postings(&self, term: &str) -> &[Posting] {
        self.terms.get(term).map_or(&[], |e| &e.postings)
    }

    pub fn df(&self, term: &str) -> u64 {
        self.postings(term).len() as u64
    }

    pub fn coll_freq(&self, term: &str) -> u64 {
        self.terms.get(term).map_or(0, |e| e.coll_freq)
    }

    pub fn tf(&self, term: &str, doc: DocId) -> u32 {
        let p = self.postings(term);
        p.binary_search_by_key(&doc, |p| p.doc)
            .map_or(0, |i| p[i].tf)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{FORMAT_MAGIC}\t{FORMAT_VERSION}")?;
        writeln!(w, "normalize\t{}", self.normalizer.label())?;
        writeln!(w, "docs\t{}", self.docnos.len())?;
        for (docno, len) in self.docnos.iter().zip(&self.doc_len) {
            writeln!(w, "{docno}\t{len}")?;
        }
        let mut terms: Vec<&String> = self.terms.keys().collect();
        terms.sort();
        writeln!(w, "terms\t{}", terms.len())?;
        for term in terms {
            write!(w, "{term}")?;
            for p in &self.terms[term].postings {
                write!(w, "\t{}:{}", p.doc, p.tf)?;
            }
            writeln!(w)?;
        }
        writeln!(w, "end\t{}", self.total_tokens)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(file))
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, Ok(line))) => Ok((i + 1, line)),
                Some((i, Err(e))) => Err(Error::ParseLine {
                    line: i + 1,
                    message: e.to_string(),
                }),
                None => Err(Error::Format(format!("truncated index: missing {what}"))),
            }
        };
        let bad = |line: usize, message: &str| Error::ParseLine {
            line,
            message: message.to_string(),
        };
        let count_line = |ln: usize, line: &str, key: &str| -> Result<usize> {
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix('\t'))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad(ln, &format!("expected {key}<TAB>count")))
        };

        let (_, header) = next("header")?;
        let version = header
            .strip_prefix(FORMAT_MAGIC)
            .and_then(|rest| rest.strip_prefix('\t'))
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| Error::Format("not an index file".into()))?;
        if version != FORMAT_VERSION {
            return Err(Error::Version {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let (ln, line) = next("normalize")?;
        let normalizer = line
            .strip_prefix("normalize\t")
            .and_then(Normalizer::from_label)
            .ok_or_else(|| bad(ln, "unknown normalization"))?;

        let (ln, line) = next("docs")?;
        let num_docs = count_line(ln, &line, "docs")?;
        let mut docnos = Vec::with_capacity(num_docs);
        let mut doc_len = Vec::with_capacity(num_docs);
        for _ in 0..num_docs {
            let (ln, line) = next("document line")?;
            let (docno, len) = line
                .split_once('\t')
                .ok_or_else(|| bad(ln, "expected docno<TAB>length"))?;
            docnos.push(docno.to_string());
            doc_len.push(len.parse::<u64>().map_err(|_| bad(ln, "bad length"))?);
        }

        let (ln, line) = next("terms")?;
        let num_terms = count_line(ln, &line, "terms")?;
        let mut terms = HashMap::with_capacity(num_terms);
        for _ in 0..num_terms {
            let (ln, line) = next("term line")?;
            let mut fields = line.split('\t');
            let term = fields.next().unwrap_or_default().to_string();
            let mut entry = TermEntry::default();
            for field in fields {
                let (doc, tf) = field
                    .split_once(':')
                    .ok_or_else(|| bad(ln, "expected doc:tf"))?;
                let doc: DocId = doc.parse().map_err(|_| bad(ln, "bad doc id"))?;
                let tf: u32 = tf.parse().map_err(|_| bad(ln, "bad tf"))?;
                if doc as usize >= num_docs || tf == 0 {
                    return Err(bad(ln, "posting out of range"));
                }
                if entry.postings.last().is_some_and(|p| p.doc >= doc) {
                    return Err(bad(ln, "postings not sorted by doc id"));
                }
                entry.coll_freq += u64::from(tf);
                entry.postings.push(Posting { doc, tf });
            }
            if entry.postings.is_empty() {
                return Err(bad(ln, "term without postings"));
            }
            terms.insert(term, entry);
        }

        let (ln, line) = next("end marker")?;
        let total_tokens: u64 = line
            .strip_prefix("end\t")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(ln, "expected end<TAB>total"))?;
        if total_tokens != doc_len.iter().sum::<u64>() {
            return Err(Error::Format(
                "token total does not match document lengths".into(),
            ));
        }
        Ok(Self {
            normalizer,
            docnos,
            doc_len,
            terms,
            total_tokens,
        })
    }
}

/// Incremental index construction; shards built separately can be merged.
#[derive(Debug, Clone)]
pub struct IndexBuilder {
    normalizer: Normalizer,
    stopwords: HashSet<String>,
    seen: HashSet<String>,
    docnos: Vec<String>,
    doc_len: Vec<u64>,
    terms: HashMap<String, TermEntry>,
}

impl IndexBuilder {
    pub fn new(normalizer: Normalizer) -> Self {
        Self {
            normalizer,
            stopwords: HashSet::new(),
            seen: HashSet::new(),
            docnos: Vec::new(),
            doc_len: Vec::new(),
            terms: HashMap::new(),
        }
    }

    /// Terms (after normalization) left out of the index. Empty by default.
    pub fn with_stopwords<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, words: I) -> Self {
        self.stopwords = words
            .into_iter()
            .map(|w| self.normalizer.normalize(w.as_ref()))
            .collect();
        self
    }

    pub fn add_tokens<'a>(
        &mut self,
        docno: &str,
        tokens: impl IntoIterator<Item = &'a str>,
    ) -> Result<DocId> {
        if !self.seen.insert(docno.to_string()) {
            return Err(Error::DuplicateDocno(docno.to_string()));
        }
        let doc = DocId::try_from(self.docnos.len())
            .map_err(|_| Error::Invalid("too many documents".into()))?;
        let mut counts: HashMap<String, u32> = HashMap::new();
        let mut len = 0u64;
        for token in tokens {
            let Some(term) = self.normalizer.term(token) else {
                continue;
            };
            if self.stopwords.contains(&term) {
                continue;
            }
            len += 1;
            *counts.entry(term).or_insert(0) += 1;
        }
        for (term, tf) in counts {
            let entry = self.terms.entry(term).or_default();
            entry.postings.push(Posting { doc, tf });
            entry.coll_freq += u64::from(tf);
        }
        self.docnos.push(docno.to_string());
        self.doc_len.push(len);
        Ok(doc)
    }

    pub fn add_raw(&mut self, doc: &RawDocument) -> Result<DocId> {
        self.add_tokens(&doc.docno, doc.tokens.iter().map(String::as_str))
    }

    pub fn add_tagged(&mut self, doc: &TaggedDocument) -> Result<DocId> {
        self.add_tokens(&doc.docno, doc.tokens.iter().map(|t| t.surface.as_str()))
    }

    /// Appends another shard; its documents receive ids after this builder's.
    pub fn merge(&mut self, other: IndexBuilder) -> Result<()> {
        if other.normalizer != self.normalizer {
            return Err(Error::Invalid(
                "cannot merge index shards with different normalization".into(),
            ));
        }
        if let Some(dup) = other.docnos.iter().find(|d| self.seen.contains(*d)) {
            return Err(Error::DuplicateDocno(dup.clone()));
        }
        let offset = DocId::try_from(self.docnos.len())
            .map_err(|_| Error::Invalid("too many documents".into()))?;
        for (term, entry) in other.terms {
            let mine = self.terms.entry(term).or_default();
            mine.coll_freq += entry.coll_freq;
            mine.postings
                .extend(entry.postings.into_iter().map(|p| Posting {
                    doc: p.doc + offset,
                    tf: p.tf,
                }));
        }
        self.seen.extend(other.seen);
        self.docnos.extend(other.docnos);
        self.doc_len.extend(other.doc_len);
        Ok(())
    }

    pub fn finish(self) -> InvertedIndex {
        let total_tokens = self.doc_len.iter().sum();
        InvertedIndex {
            normalizer: self.normalizer,
            docnos: self.docnos,
            doc_len: self.doc_len,
            terms: self.terms,
            total_tokens,
        }
    }
}
