//! Reference computations for tests.
//!
//! Nothing here depends on the `posweight` crate: every quantity is recomputed
//! from raw token/tag lists by direct enumeration, so a test comparing the two
//! checks the production code against an independent derivation.

pub mod synth;

use std::collections::{BTreeMap, BTreeSet};

/// One tagged document as plain `(surface, coarse tag)` pairs.
pub type TaggedTokens = Vec<(String, String)>;

/// Term key for a surface form: lowercase, or `None` when it has no letters or digits.
pub fn term_key(surface: &str) -> Option<String> {
    if surface.chars().any(char::is_alphanumeric) {
        Some(surface.to_lowercase())
    } else {
        None
    }
}

/// All windows of the collection as (tag sequence, set of terms in the window).
fn all_windows(docs: &[TaggedTokens], n: usize) -> Vec<(Vec<String>, BTreeSet<String>)> {
    let mut out = Vec::new();
    for doc in docs {
        if doc.len() < n {
            continue;
        }
        for start in 0..=doc.len() - n {
            let slice = &doc[start..start + n];
            let tags = slice.iter().map(|(_, t)| t.clone()).collect();
            let terms = slice.iter().filter_map(|(s, _)| term_key(s)).collect();
            out.push((tags, terms));
        }
    }
    out
}

/// Every weight kind recomputed from scratch for every term of `docs`.
///
/// `kind` is one of `pos_ml_boolean`, `pos_ml_weighted`, `pos_idf`, `pos_ridf`, `pos_bs`.
pub fn brute_weights(docs: &[TaggedTokens], n: usize, kind: &str) -> BTreeMap<String, f64> {
    let windows = all_windows(docs, n);
    let total = windows.len() as f64;
    let types: BTreeSet<&Vec<String>> = windows.iter().map(|(t, _)| t).collect();
    let num_types = types.len() as f64;
    let vocabulary: BTreeSet<&String> = windows.iter().flat_map(|(_, terms)| terms).collect();

    let mut out = BTreeMap::new();
    for term in vocabulary {
        let containing: Vec<&Vec<String>> = windows
            .iter()
            .filter(|(_, terms)| terms.contains(term))
            .map(|(tags, _)| tags)
            .collect();
        let tf = containing.len() as f64;
        let distinct: BTreeSet<&Vec<String>> = containing.iter().copied().collect();
        let pf = distinct.len() as f64;
        let p_informative = |ngram: &Vec<String>| {
            windows.iter().filter(|(tags, _)| tags == ngram).count() as f64 / total
        };
        let value = match kind {
            "pos_ml_boolean" => distinct.iter().map(|g| p_informative(g) * (1.0 / pf)).sum(),
            "pos_ml_weighted" => distinct
                .iter()
                .map(|g| {
                    let c = containing.iter().filter(|h| **h == *g).count() as f64;
                    p_informative(g) * (c / tf)
                })
                .sum(),
            "pos_idf" => (num_types / pf).ln(),
            "pos_ridf" => (num_types / pf).ln() + (1.0 - (-tf / num_types).exp()).ln(),
            "pos_bs" => (1.0 + (tf - pf).max(0.0)).ln(),
            other => panic!("unknown weight kind {other}"),
        };
        out.insert(term.clone(), value);
    }
    out
}

/// Parameters of the three scoring functions.
#[derive(Debug, Clone, Copy)]
pub struct BruteParams {
    pub k1: f64,
    pub b: f64,
    pub k3: f64,
    pub mu: f64,
    pub slope: f64,
}

impl Default for BruteParams {
    fn default() -> Self {
        Self {
            k1: 1.2,
            b: 0.75,
            k3: 1000.0,
            mu: 2500.0,
            slope: 0.2,
        }
    }
}

/// Score of every document matching at least one query term, computed by direct
/// counting over the raw documents. `bonus` optionally adds `w · weight(t)` for
/// every distinct query term present in the document.
pub fn brute_score(
    model: &str,
    query: &[String],
    docs: &[(String, Vec<String>)],
    params: BruteParams,
    bonus: Option<(f64, &BTreeMap<String, f64>)>,
) -> BTreeMap<String, f64> {
    let docs: Vec<(&String, Vec<String>)> = docs
        .iter()
        .map(|(d, toks)| (d, toks.iter().filter_map(|t| term_key(t)).collect()))
        .collect();
    let num_docs = docs.len() as f64;
    let total_tokens: usize = docs.iter().map(|(_, t)| t.len()).sum();
    let avdl = total_tokens as f64 / num_docs;

    // distinct query terms in first-occurrence order with their counts
    let mut qterms: Vec<(String, f64)> = Vec::new();
    for t in query {
        if let Some(e) = qterms.iter_mut().find(|(u, _)| u == t) {
            e.1 += 1.0;
        } else {
            qterms.push((t.clone(), 1.0));
        }
    }

    let mut out = BTreeMap::new();
    for (docno, toks) in &docs {
        let count = |t: &str| toks.iter().filter(|x| x.as_str() == t).count() as f64;
        if qterms.iter().all(|(t, _)| count(t) == 0.0) {
            continue;
        }
        let dl = toks.len() as f64;
        let mut score = 0.0;
        for (t, qtf) in &qterms {
            let tf = count(t);
            let df = docs.iter().filter(|(_, d)| d.contains(t)).count() as f64;
            let cf: f64 = docs
                .iter()
                .map(|(_, d)| d.iter().filter(|x| *x == t).count() as f64)
                .sum();
            let contribution = match model {
                "tfidf" if tf > 0.0 => Some(
                    qtf * ((1.0 + (1.0 + tf.ln()).ln())
                        / ((1.0 - params.slope) + params.slope * dl / avdl))
                        * ((num_docs + 1.0) / df).ln(),
                ),
                "bm25" if tf > 0.0 => {
                    let idf = ((num_docs - df + 0.5) / (df + 0.5)).ln().max(0.0);
                    let k = params.k1 * ((1.0 - params.b) + params.b * dl / avdl);
                    Some(
                        idf * (tf * (params.k1 + 1.0)) / (tf + k) * (qtf * (params.k3 + 1.0))
                            / (qtf + params.k3),
                    )
                }
                "dirichlet" if cf > 0.0 => {
                    let p = cf / total_tokens as f64;
                    Some(qtf * ((tf + params.mu * p) / (dl + params.mu)).ln())
                }
                "tfidf" | "bm25" | "dirichlet" => None,
                other => panic!("unknown model {other}"),
            };
            if let Some(c) = contribution {
                score += c;
                if tf > 0.0 {
                    if let Some((w, weights)) = bonus {
                        score += w * weights.get(t).copied().unwrap_or(0.0);
                    }
                }
            }
        }
        out.insert((*docno).clone(), score);
    }
    out
}

/// Definitional rank: 1 + number of smaller values + half the number of other equal values.
pub fn definitional_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            let less = values.iter().filter(|x| *x < v).count() as f64;
            let equal = values.iter().filter(|x| *x == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Pearson correlation of definitional ranks.
pub fn brute_spearman(a: &[f64], b: &[f64]) -> f64 {
    let ra = definitional_ranks(a);
    let rb = definitional_ranks(b);
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Exact Wilcoxon signed-rank tail probabilities by listing all `2^n` sign patterns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumeratedWilcoxon {
    pub n: usize,
    pub w_plus: f64,
    pub p_greater: f64,
    pub p_less: f64,
    pub p_two_sided: f64,
}

pub fn wilcoxon_enumerate(baseline: &[f64], treatment: &[f64]) -> EnumeratedWilcoxon {
    let diffs: Vec<f64> = treatment
        .iter()
        .zip(baseline)
        .map(|(t, b)| t - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    assert!(n <= 20, "enumeration limited to 20 pairs");
    let ranks = definitional_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let observed: f64 = ranks
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| r)
        .sum();
    let (mut ge, mut le) = (0u64, 0u64);
    for mask in 0u64..(1u64 << n) {
        let w: f64 = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| ranks[i])
            .sum();
        if w >= observed {
            ge += 1;
        }
        if w <= observed {
            le += 1;
        }
    }
    let all = (1u64 << n) as f64;
    let (p_greater, p_less) = (ge as f64 / all, le as f64 / all);
    EnumeratedWilcoxon {
        n,
        w_plus: observed,
        p_greater,
        p_less,
        p_two_sided: (2.0 * p_greater.min(p_less)).min(1.0),
    }
}

/// Uninterpolated average precision straight from the definition.
pub fn brute_average_precision(ranked: &[&str], relevant: &BTreeSet<&str>) -> f64 {
    let mut sum = 0.0;
    for (i, d) in ranked.iter().enumerate() {
        if relevant.contains(d) {
            let hits = ranked[..=i]
                .iter()
                .filter(|x| relevant.contains(*x))
                .count();
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / relevant.len() as f64
}
