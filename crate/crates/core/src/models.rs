//! Pivoted TF-IDF, BM25 and Dirichlet-smoothed query likelihood.
//!
//! Scoring is document-at-a-time over the union of the query terms' postings.
//! Each document's score is a sum of per-term contributions taken in query order,
//! which keeps results independent of document ids and thread count.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::corpus::Query;
use crate::error::{Error, Result};
use crate::index::{DocId, InvertedIndex, Posting};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    TfIdf,
    Bm25,
    Dirichlet,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::TfIdf, Model::Bm25, Model::Dirichlet];

    pub fn name(self) -> &'static str {
        match self {
            Model::TfIdf => "tfidf",
            Model::Bm25 => "bm25",
            Model::Dirichlet => "dirichlet",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown model {s:?}; valid models: tfidf, bm25, dirichlet"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params<S> {
    pub k1: S,
    pub b: S,
    pub k3: S,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<S> {
    pub bm25: Bm25Params<S>,
    /// Dirichlet prior mass.
    pub mu: S,
    /// Pivoted length normalization slope.
    pub slope: S,
}

impl<S: Scalar> Default for ModelParams<S> {
    fn default() -> Self {
        Self {
            bm25: Bm25Params {
                k1: S::lit(1.2),
                b: S::lit(0.75),
                k3: S::lit(1000.0),
            },
            mu: S::lit(2500.0),
            slope: S::lit(0.2),
        }
    }
}

impl<S: Scalar> ModelParams<S> {
    pub fn with_mu(mut self, mu: S) -> Self {
        self.mu = mu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.bm25.k1, self.bm25.b, self.bm25.k3, self.mu, self.slope]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("model parameters must be finite".into()));
        }
        if self.mu <= S::zero() {
            return Err(Error::Config("mu must be positive".into()));
        }
        if self.slope < S::zero() || self.slope > S::one() {
            return Err(Error::Config("pivot slope must lie in [0, 1]".into()));
        }
        if self.bm25.k1 < S::zero() || self.bm25.k3 < S::zero() {
            return Err(Error::Config("k1 and k3 must be non-negative".into()));
        }
        if self.bm25.b < S::zero() || self.bm25.b > S::one() {
            return Err(Error::Config("b must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc<S> {
    pub docno: String,
    pub score: S,
}

/// Collection-level statistics of one query term.
#[derive(Debug, Clone, Copy)]
pub struct TermContext<S> {
    pub qtf: u32,
    pub df: u64,
    pub coll_freq: u64,
    pub num_docs: u64,
    pub total_tokens: u64,
    pub avg_doc_len: S,
}

/// Pivoted log-log TF-IDF contribution of one matched term.
pub fn tfidf_term<S: Scalar>(tf: u32, dl: u64, ctx: &TermContext<S>, params: &ModelParams<S>) -> S {
    if tf == 0 {
        return S::zero();
    }
    let one = S::one();
    let s = params.slope;
    let tf_part = one + (one + S::from_count(tf.into()).ln()).ln();
    let norm = (one - s) + s * S::from_count(dl) / ctx.avg_doc_len;
    let idf = (S::from_count(ctx.num_docs + 1) / S::from_count(ctx.df)).ln();
    S::from_count(ctx.qtf.into()) * (tf_part / norm) * idf
}

/// BM25 contribution of one matched term, with the RSJ idf floored at zero.
pub fn bm25_term<S: Scalar>(tf: u32, dl: u64, ctx: &TermContext<S>, params: &ModelParams<S>) -> S {
    if tf == 0 {
        return S::zero();
    }
    let Bm25Params { k1, b, k3 } = params.bm25;
    let one = S::one();
    let half = S::lit(0.5);
    let n = S::from_count(ctx.num_docs);
    let df = S::from_count(ctx.df);
    let idf = ((n - df + half) / (df + half)).ln().max(S::zero());
    let tf = S::from_count(tf.into());
    let qtf = S::from_count(ctx.qtf.into());
    let k = k1 * ((one - b) + b * S::from_count(dl) / ctx.avg_doc_len);
    idf * (tf * (k1 + one)) / (tf + k) * (qtf * (k3 + one)) / (qtf + k3)
}

/// Dirichlet-smoothed log-likelihood contribution; `None` for terms absent from the collection.
pub fn dirichlet_term<S: Scalar>(
    tf: u32,
    dl: u64,
    ctx: &TermContext<S>,
    params: &ModelParams<S>,
) -> Option<S> {
    if ctx.coll_freq == 0 || ctx.total_tokens == 0 {
        return None;
    }
    let p_coll = S::from_count(ctx.coll_freq) / S::from_count(ctx.total_tokens);
    let mu = params.mu;
    let num = S::from_count(tf.into()) + mu * p_coll;
    let den = S::from_count(dl) + mu;
    Some(S::from_count(ctx.qtf.into()) * (num / den).ln())
}

/// Distinct query terms with their query frequencies, in first-occurrence order.
pub fn query_term_counts(terms: &[String]) -> Vec<(&str, u32)> {
    let mut out: Vec<(&str, u32)> = Vec::new();
    for t in terms {
        match out.iter_mut().find(|(u, _)| *u == t.as_str()) {
            Some(entry) => entry.1 += 1,
            None => out.push((t.as_str(), 1)),
        }
    }
    out
}

struct QueryTerm<'a, S> {
    term: &'a str,
    postings: &'a [Posting],
    ctx: TermContext<S>,
}

fn prepare<'a, S: Scalar>(query: &'a Query, index: &'a InvertedIndex) -> Vec<QueryTerm<'a, S>> {
    let avg_doc_len = index.avg_doc_len::<S>();
    query_term_counts(&query.terms)
        .into_iter()
        .map(|(term, qtf)| QueryTerm {
            term,
            postings: index.postings(term),
            ctx: TermContext {
                qtf,
                df: index.df(term),
                coll_freq: index.coll_freq(term),
                num_docs: index.num_docs() as u64,
                total_tokens: index.total_tokens(),
                avg_doc_len,
            },
        })
        .collect()
}

/// Contribution of one query term to one document, or `None` when the term
/// does not take part in that document's score.
fn term_contribution<S: Scalar>(
    model: Model,
    tf: u32,
    dl: u64,
    ctx: &TermContext<S>,
    params: &ModelParams<S>,
) -> Option<S> {
    match model {
        Model::TfIdf if tf > 0 => Some(tfidf_term(tf, dl, ctx, params)),
        Model::Bm25 if tf > 0 => Some(bm25_term(tf, dl, ctx, params)),
        Model::Dirichlet => dirichlet_term(tf, dl, ctx, params),
        _ => None,
    }
}

/// Scores every document matching at least one query term.
///
/// `matched` is applied to the contribution of each query term the document
/// contains (`tf > 0`) and may adjust it; unmatched Dirichlet terms pass through unchanged.
pub fn score_candidates<S, F>(
    query: &Query,
    index: &InvertedIndex,
    model: Model,
    params: &ModelParams<S>,
    matched: F,
) -> Vec<(DocId, S)>
where
    S: Scalar,
    F: Fn(&str, S) -> S,
{
    let terms = prepare::<S>(query, index);
    let mut candidates: Vec<DocId> = terms
        .iter()
        .flat_map(|t| t.postings.iter().map(|p| p.doc))
        .collect();
    candidates.sort_unstable();
    candidates.dedup();

    let mut cursors = vec![0usize; terms.len()];
    candidates
        .into_iter()
        .map(|doc| {
            let dl = index.doc_len(doc);
            let mut score = S::zero();
            for (qt, cursor) in terms.iter().zip(cursors.iter_mut()) {
                while *cursor < qt.postings.len() && qt.postings[*cursor].doc < doc {
                    *cursor += 1;
                }
                let tf = match qt.postings.get(*cursor) {
                    Some(p) if p.doc == doc => p.tf,
                    _ => 0,
                };
                if let Some(c) = term_contribution(model, tf, dl, &qt.ctx, params) {
                    score = score + if tf > 0 { matched(qt.term, c) } else { c };
                }
            }
            (doc, score)
        })
        .collect()
}

/// Descending score, ties by ascending docno, truncated to `k`.
pub fn rank<S: Scalar>(
    index: &InvertedIndex,
    scored: Vec<(DocId, S)>,
    k: usize,
) -> Vec<ScoredDoc<S>> {
    let mut scored = scored;
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| index.docno(a.0).cmp(index.docno(b.0)))
    });
    scored.truncate(k);
    scored
        .into_iter()
        .map(|(doc, score)| ScoredDoc {
            docno: index.docno(doc).to_string(),
            score,
        })
        .collect()
}

pub fn retrieve<S: Scalar>(
    query: &Query,
    index: &InvertedIndex,
    model: Model,
    params: &ModelParams<S>,
    k: usize,
) -> Vec<ScoredDoc<S>> {
    rank(
        index,
        score_candidates(query, index, model, params, |_, c| c),
        k,
    )
}

/// Score of a single document, or `None` when it matches no query term.
pub fn score<S: Scalar>(
    model: Model,
    query: &Query,
    docno: &str,
    index: &InvertedIndex,
    params: &ModelParams<S>,
) -> Option<S> {
    let doc = index.docnos().iter().position(|d| d == docno)? as DocId;
    let terms = prepare::<S>(query, index);
    if terms.iter().all(|t| index.tf(t.term, doc) == 0) {
        return None;
    }
    let dl = index.doc_len(doc);
    Some(
        terms
            .iter()
            .filter_map(|t| term_contribution(model, index.tf(t.term, doc), dl, &t.ctx, params))
            .fold(S::zero(), |a, b| a + b),
    )
}

pub fn score_tfidf_pivoted<S: Scalar>(
    query: &Query,
    docno: &str,
    index: &InvertedIndex,
    params: &ModelParams<S>,
) -> Option<S> {
    score(Model::TfIdf, query, docno, index, params)
}

pub fn score_bm25<S: Scalar>(
    query: &Query,
    docno: &str,
    index: &InvertedIndex,
    params: &ModelParams<S>,
) -> Option<S> {
    score(Model::Bm25, query, docno, index, params)
}

pub fn score_dirichlet<S: Scalar>(
    query: &Query,
    docno: &str,
    index: &InvertedIndex,
    params: &ModelParams<S>,
) -> Option<S> {
    score(Model::Dirichlet, query, docno, index, params)
}
