//! Sliding-window POS n-gram statistics.
//!
//! Every contiguous window of `n` tokens in a document is one occurrence of the
//! POS n-gram formed by its tags. A term co-occurs with a window's n-gram once per
//! window that contains it, however often it repeats inside that window.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{Normalizer, TaggedDocument};
use crate::error::{Error, Result};
use crate::tagger::{CoarseTag, TagSet};

pub const MIN_WINDOW: usize = 2;
pub const MAX_WINDOW: usize = 8;
const FORMAT_MAGIC: &str = "posweight-posstats";
const FORMAT_VERSION: u32 = 1;

/// Window length `n`, validated to lie in `[2, 8]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WindowLength(usize);

impl WindowLength {
    pub fn new(n: usize) -> Result<Self> {
        if (MIN_WINDOW..=MAX_WINDOW).contains(&n) {
            Ok(Self(n))
        } else {
            Err(Error::Config(format!(
                "POS n-gram length must be in [{MIN_WINDOW}, {MAX_WINDOW}], got {n}"
            )))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl Default for WindowLength {
    fn default() -> Self {
        Self(4)
    }
}

impl fmt::Display for WindowLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A sequence of up to eight coarse tags packed into one word, first tag in the
/// most significant used byte so that the derived order is lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PosNgram {
    len: u8,
    packed: u64,
}

impl PosNgram {
    pub fn from_tags(tags: &[CoarseTag]) -> Self {
        assert!(
            tags.len() <= MAX_WINDOW,
            "POS n-gram longer than {MAX_WINDOW}"
        );
        let packed = tags.iter().fold(0u64, |acc, t| (acc << 8) | u64::from(t.0));
        Self {
            len: tags.len() as u8,
            packed,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn tags(&self) -> impl Iterator<Item = CoarseTag> + '_ {
        (0..self.len)
            .rev()
            .map(move |i| CoarseTag((self.packed >> (8 * i)) as u8))
    }

    pub fn display<'a>(&'a self, tagset: &'a TagSet) -> impl fmt::Display + 'a {
        NgramDisplay {
            ngram: self,
            tagset,
        }
    }
}

impl fmt::Debug for PosNgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.tags().map(|t| t.0)).finish()
    }
}

struct NgramDisplay<'a> {
    ngram: &'a PosNgram,
    tagset: &'a TagSet,
}

impl fmt::Display for NgramDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tag) in self.ngram.tags().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.tagset.name(tag))?;
        }
        Ok(())
    }
}

/// One window: its POS n-gram and the distinct terms it contains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window<'a> {
    pub ngram: PosNgram,
    pub terms: Vec<&'a str>,
}

/// Tags and normalized terms of one document, ready for window iteration.
#[derive(Debug, Clone)]
pub struct DocWindows {
    n: usize,
    tags: Vec<CoarseTag>,
    terms: Vec<Option<String>>,
}

impl DocWindows {
    pub fn len(&self) -> usize {
        (self.tags.len() + 1).saturating_sub(self.n)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Window<'_>> + '_ {
        (0..self.len()).map(move |start| {
            let end = start + self.n;
            let mut terms: Vec<&str> = Vec::with_capacity(self.n);
            for term in self.terms[start..end].iter().flatten() {
                if !terms.contains(&term.as_str()) {
                    terms.push(term);
                }
            }
            Window {
                ngram: PosNgram::from_tags(&self.tags[start..end]),
                terms,
            }
        })
    }
}

/// Prepares the windows of one document. Documents shorter than `n` have none.
pub fn extract(doc: &TaggedDocument, n: WindowLength, normalizer: &Normalizer) -> DocWindows {
    DocWindows {
        n: n.get(),
        tags: doc.tokens.iter().map(|t| t.tag).collect(),
        terms: doc
            .tokens
            .iter()
            .map(|t| normalizer.term(&t.surface))
            .collect(),
    }
}

/// Collection-wide POS n-gram counts and term/n-gram co-occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosNgramStats {
    n: WindowLength,
    tagset: TagSet,
    ngram_count: BTreeMap<PosNgram, u64>,
    total_windows: u64,
    term_map: HashMap<String, BTreeMap<PosNgram, u64>>,
}

impl PosNgramStats {
    pub fn new(n: WindowLength, tagset: TagSet) -> Self {
        Self {
            n,
            tagset,
            ngram_count: BTreeMap::new(),
            total_windows: 0,
            term_map: HashMap::new(),
        }
    }

    pub fn add_window(&mut self, window: &Window<'_>) {
        debug_assert_eq!(window.ngram.len(), self.n.get());
        *self.ngram_count.entry(window.ngram).or_insert(0) += 1;
        self.total_windows += 1;
        for term in &window.terms {
            let per_term = match self.term_map.get_mut(*term) {
                Some(m) => m,
                None => self.term_map.entry((*term).to_string()).or_default(),
            };
            *per_term.entry(window.ngram).or_insert(0) += 1;
        }
    }

    pub fn add_document(&mut self, doc: &TaggedDocument, normalizer: &Normalizer) {
        let windows = extract(doc, self.n, normalizer);
        for window in windows.iter() {
            self.add_window(&window);
        }
    }

    /// Count-wise addition of statistics gathered over a disjoint set of documents.
    pub fn merge(&mut self, other: PosNgramStats) -> Result<()> {
        if self.n != other.n || self.tagset != other.tagset {
            return Err(Error::Invalid(
                "cannot merge POS statistics with different n or tag sets".into(),
            ));
        }
        for (ngram, count) in other.ngram_count {
            *self.ngram_count.entry(ngram).or_insert(0) += count;
        }
        self.total_windows += other.total_windows;
        for (term, ngrams) in other.term_map {
            let mine = self.term_map.entry(term).or_default();
            for (ngram, count) in ngrams {
                *mine.entry(ngram).or_insert(0) += count;
            }
        }
        Ok(())
    }

    pub fn from_documents<'a>(
        docs: impl IntoIterator<Item = &'a TaggedDocument>,
        n: WindowLength,
        tagset: TagSet,
        normalizer: &Normalizer,
    ) -> Self {
        let mut stats = Self::new(n, tagset);
        for doc in docs {
            stats.add_document(doc, normalizer);
        }
        stats
    }

    /// Sharded accumulation over the rayon pool; identical to [`Self::from_documents`].
    pub fn from_documents_par(
        docs: &[TaggedDocument],
        n: WindowLength,
        tagset: TagSet,
        normalizer: &Normalizer,
    ) -> Self {
        docs.par_chunks(256)
            .map(|chunk| Self::from_documents(chunk, n, tagset.clone(), normalizer))
            .reduce(
                || Self::new(n, tagset.clone()),
                |mut a, b| {
                    a.merge(b).expect("shards share n and tag set");
                    a
                },
            )
    }

    pub fn n(&self) -> WindowLength {
        self.n
    }

    pub fn tagset(&self) -> &TagSet {
        &self.tagset
    }

    pub fn ngram_count(&self, ngram: &PosNgram) -> u64 {
        self.ngram_count.get(ngram).copied().unwrap_or(0)
    }

    pub fn ngrams(&self) -> impl Iterator<Item = (&PosNgram, u64)> {
        self.ngram_count.iter().map(|(k, v)| (k, *v))
    }

    pub fn total_windows(&self) -> u64 {
        self.total_windows
    }

    /// Number of distinct POS n-gram types, `|C|`.
    pub fn distinct_types(&self) -> u64 {
        self.ngram_count.len() as u64
    }

    /// Co-occurrence counts `c(t, POS)` for every POS n-gram containing `term`.
    pub fn term(&self, term: &str) -> Option<&BTreeMap<PosNgram, u64>> {
        self.term_map.get(term)
    }

    /// Number of distinct POS n-grams containing `term` (0 when absent).
    pub fn pf(&self, term: &str) -> u64 {
        self.term(term).map_or(0, |m| m.len() as u64)
    }

    /// Number of (window, term) containment events for `term` (0 when absent).
    pub fn tf(&self, term: &str) -> u64 {
        self.term(term).map_or(0, |m| m.values().sum())
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.term_map.keys().map(String::as_str)
    }

    pub fn num_terms(&self) -> usize {
        self.term_map.len()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{FORMAT_MAGIC}\t{FORMAT_VERSION}")?;
        writeln!(w, "n\t{}", self.n)?;
        write!(w, "tags")?;
        for name in self.tagset.names() {
            write!(w, "\t{name}")?;
        }
        writeln!(w)?;
        writeln!(w, "ngrams\t{}", self.ngram_count.len())?;
        let mut position = HashMap::with_capacity(self.ngram_count.len());
        for (i, (ngram, count)) in self.ngram_count.iter().enumerate() {
            position.insert(*ngram, i);
            writeln!(w, "{}\t{count}", ngram.display(&self.tagset))?;
        }
        let mut terms: Vec<&String> = self.term_map.keys().collect();
        terms.sort();
        writeln!(w, "terms\t{}", terms.len())?;
        for term in terms {
            write!(w, "{term}")?;
            for (ngram, count) in &self.term_map[term] {
                write!(w, "\t{}:{count}", position[ngram])?;
            }
            writeln!(w)?;
        }
        writeln!(w, "end\t{}", self.total_windows)
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
                None => Err(Error::Format(format!(
                    "truncated POS statistics: missing {what}"
                ))),
            }
        };
        let bad = |line: usize, message: &str| Error::ParseLine {
            line,
            message: message.to_string(),
        };

        let (_, header) = next("header")?;
        let version = header
            .strip_prefix(FORMAT_MAGIC)
            .and_then(|rest| rest.strip_prefix('\t'))
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| Error::Format("not a POS statistics file".into()))?;
        if version != FORMAT_VERSION {
            return Err(Error::Version {
                found: version,
                supported: FORMAT_VERSION,
            });
        }

        let (ln, line) = next("n")?;
        let n = line
            .strip_prefix("n\t")
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| bad(ln, "expected n<TAB>value"))?;
        let n = WindowLength::new(n)?;

        let (ln, line) = next("tags")?;
        let names: Vec<&str> = line
            .strip_prefix("tags\t")
            .ok_or_else(|| bad(ln, "expected tags line"))?
            .split('\t')
            .collect();
        let tagset = TagSet::new(names.iter().copied())?;
        if tagset.len() != names.len() {
            return Err(bad(ln, "tag set does not round-trip"));
        }

        let (ln, line) = next("ngrams")?;
        let num_ngrams = line
            .strip_prefix("ngrams\t")
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| bad(ln, "expected ngrams<TAB>count"))?;
        let mut ordered = Vec::with_capacity(num_ngrams);
        let mut ngram_count = BTreeMap::new();
        for _ in 0..num_ngrams {
            let (ln, line) = next("n-gram line")?;
            let (tags, count) = line
                .split_once('\t')
                .ok_or_else(|| bad(ln, "expected n-gram<TAB>count"))?;
            let tags = tags
                .split(' ')
                .map(|name| tagset.get(name).ok_or_else(|| bad(ln, "unknown tag")))
                .collect::<Result<Vec<_>>>()?;
            if tags.len() != n.get() {
                return Err(bad(ln, "n-gram length differs from n"));
            }
            let count: u64 = count.parse().map_err(|_| bad(ln, "bad count"))?;
            let ngram = PosNgram::from_tags(&tags);
            ordered.push(ngram);
            ngram_count.insert(ngram, count);
        }

        let (ln, line) = next("terms")?;
        let num_terms = line
            .strip_prefix("terms\t")
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| bad(ln, "expected terms<TAB>count"))?;
        let mut term_map = HashMap::with_capacity(num_terms);
        for _ in 0..num_terms {
            let (ln, line) = next("term line")?;
            let mut fields = line.split('\t');
            let term = fields.next().unwrap_or_default().to_string();
            let mut ngrams = BTreeMap::new();
            for field in fields {
                let (idx, count) = field
                    .split_once(':')
                    .ok_or_else(|| bad(ln, "expected index:count"))?;
                let idx: usize = idx.parse().map_err(|_| bad(ln, "bad n-gram index"))?;
                let ngram = *ordered
                    .get(idx)
                    .ok_or_else(|| bad(ln, "n-gram index out of range"))?;
                let count: u64 = count.parse().map_err(|_| bad(ln, "bad count"))?;
                ngrams.insert(ngram, count);
            }
            if ngrams.is_empty() {
                return Err(bad(ln, "term without n-grams"));
            }
            term_map.insert(term, ngrams);
        }

        let (ln, line) = next("end marker")?;
        let total_windows = line
            .strip_prefix("end\t")
            .and_then(|v| v.parse::<u64>().ok())
            .ok_or_else(|| bad(ln, "expected end<TAB>total"))?;
        if total_windows != ngram_count.values().sum::<u64>() {
            return Err(Error::Format(
                "window total does not match n-gram counts".into(),
            ));
        }
        Ok(Self {
            n,
            tagset,
            ngram_count,
            total_windows,
            term_map,
        })
    }
}

/// Folds a window stream into fresh statistics.
pub fn accumulate<'a>(
    n: WindowLength,
    tagset: TagSet,
    windows: impl IntoIterator<Item = Window<'a>>,
) -> PosNgramStats {
    let mut stats = PosNgramStats::new(n, tagset);
    for window in windows {
        stats.add_window(&window);
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagger::TagSet;

    fn doc(set: &TagSet, docno: &str, words: &[(&str, &str)]) -> TaggedDocument {
        TaggedDocument::new(
            docno,
            words
                .iter()
                .map(|(w, t)| (w.to_string(), set.get(t).unwrap())),
        )
    }

    fn toy(set: &TagSet) -> Vec<TaggedDocument> {
        vec![
            doc(
                set,
                "D1",
                &[("the", "DET"), ("cat", "NOUN"), ("sat", "VERB")],
            ),
            doc(
                set,
                "D2",
                &[
                    ("a", "DET"),
                    ("dog", "NOUN"),
                    ("ran", "VERB"),
                    ("fast", "ADV"),
                ],
            ),
        ]
    }

    fn ng(set: &TagSet, names: &[&str]) -> PosNgram {
        PosNgram::from_tags(
            &names
                .iter()
                .map(|n| set.get(n).unwrap())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn window_length_bounds() {
        assert!(WindowLength::new(1).is_err());
        assert!(WindowLength::new(9).is_err());
        assert_eq!(WindowLength::new(2).unwrap().get(), 2);
        assert_eq!(WindowLength::default().get(), 4);
    }

    #[test]
    fn extract_examples() {
        let set = TagSet::default();
        let d = doc(
            &set,
            "D1",
            &[("the", "DET"), ("cat", "NOUN"), ("sat", "VERB")],
        );
        let norm = Normalizer::default();
        let w2 = extract(&d, WindowLength::new(2).unwrap(), &norm);
        let ngrams: Vec<PosNgram> = w2.iter().map(|w| w.ngram).collect();
        assert_eq!(
            ngrams,
            [ng(&set, &["DET", "NOUN"]), ng(&set, &["NOUN", "VERB"])]
        );
        assert_eq!(w2.iter().filter(|w| w.terms.contains(&"cat")).count(), 2);
        assert!(extract(&d, WindowLength::new(4).unwrap(), &norm).is_empty());
    }

    #[test]
    fn repeated_term_counts_once_per_window() {
        let set = TagSet::default();
        let d = doc(
            &set,
            "D",
            &[("Cat", "NOUN"), ("cat", "NOUN"), (",", "PUNCT")],
        );
        let stats = PosNgramStats::from_documents(
            [&d],
            WindowLength::new(3).unwrap(),
            set.clone(),
            &Normalizer::default(),
        );
        assert_eq!(stats.tf("cat"), 1);
        assert_eq!(stats.pf("cat"), 1);
        assert_eq!(stats.total_windows(), 1);
        assert!(stats.term(",").is_none());
    }

    #[test]
    fn toy_collection_counts() {
        let set = TagSet::default();
        let docs = toy(&set);
        let stats = PosNgramStats::from_documents(
            &docs,
            WindowLength::new(2).unwrap(),
            set.clone(),
            &Normalizer::default(),
        );
        assert_eq!(stats.ngram_count(&ng(&set, &["DET", "NOUN"])), 2);
        assert_eq!(stats.ngram_count(&ng(&set, &["NOUN", "VERB"])), 2);
        assert_eq!(stats.ngram_count(&ng(&set, &["VERB", "ADV"])), 1);
        assert_eq!(stats.total_windows(), 5);
        assert_eq!(stats.distinct_types(), 3);
        assert_eq!((stats.pf("fast"), stats.tf("fast")), (1, 1));
        assert_eq!((stats.pf("cat"), stats.tf("cat")), (2, 2));
        assert_eq!(stats.num_terms(), 7);
    }

    #[test]
    fn parallel_matches_sequential() {
        let set = TagSet::default();
        let docs: Vec<TaggedDocument> = (0..1000)
            .flat_map(|i| {
                let mut d = toy(&set);
                d[0].docno = format!("A{i}");
                d[1].docno = format!("B{i}");
                d
            })
            .collect();
        let n = WindowLength::new(2).unwrap();
        let norm = Normalizer::default();
        assert_eq!(
            PosNgramStats::from_documents(&docs, n, set.clone(), &norm),
            PosNgramStats::from_documents_par(&docs, n, set.clone(), &norm)
        );
    }

    #[test]
    fn save_load_round_trip() {
        let set = TagSet::default();
        let stats = PosNgramStats::from_documents(
            &toy(&set),
            WindowLength::new(2).unwrap(),
            set,
            &Normalizer::default(),
        );
        let mut buf = Vec::new();
        stats.write_to(&mut buf).unwrap();
        let back = PosNgramStats::read_from(&buf[..]).unwrap();
        assert_eq!(back, stats);
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            PosNgramStats::read_from(&b""[..]),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            PosNgramStats::read_from(&b"posweight-posstats\t2\n"[..]),
            Err(Error::Version {
                found: 2,
                supported: 1
            })
        ));
        let set = TagSet::default();
        let stats = PosNgramStats::from_documents(
            &toy(&set),
            WindowLength::new(2).unwrap(),
            set,
            &Normalizer::default(),
        );
        let mut buf = Vec::new();
        stats.write_to(&mut buf).unwrap();
        for cut in [buf.len() - 4, buf.len() / 2, 30] {
            assert!(
                PosNgramStats::read_from(&buf[..cut]).is_err(),
                "cut at {cut}"
            );
        }
    }

    #[test]
    fn merge_rejects_mismatched_n() {
        let set = TagSet::default();
        let mut a = PosNgramStats::new(WindowLength::new(2).unwrap(), set.clone());
        let b = PosNgramStats::new(WindowLength::new(3).unwrap(), set);
        assert!(a.merge(b).is_err());
    }
}
