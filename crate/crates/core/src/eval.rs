//! Run files, MAP / P@10, the Wilcoxon matched-pairs signed-ranks test and
//! Spearman rank correlation.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::corpus::Qrels;
use crate::error::{Error, Result};
use crate::models::ScoredDoc;
use crate::scalar::Scalar;

/// Largest number of non-zero differences for which the Wilcoxon p-value is exact.
pub const WILCOXON_EXACT_MAX: usize = 25;
/// TREC evaluation depth.
pub const DEFAULT_DEPTH: usize = 1000;

/// Ranked lists per query, tagged with a run name.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<S> {
    pub tag: String,
    pub queries: BTreeMap<String, Vec<ScoredDoc<S>>>,
}

impl<S: Scalar> RunResult<S> {
    pub fn new(tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            queries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, qid: impl Into<String>, ranked: Vec<ScoredDoc<S>>) {
        self.queries.insert(qid.into(), ranked);
    }

    pub fn get(&self, qid: &str) -> &[ScoredDoc<S>] {
        self.queries.get(qid).map_or(&[], Vec::as_slice)
    }

    /// TREC run format `qid Q0 docno rank score tag`, queries in the given order.
    pub fn to_trec(&self, qid_order: &[String]) -> String {
        let mut out = String::new();
        for qid in qid_order {
            for (i, d) in self.get(qid).iter().enumerate() {
                writeln!(
                    out,
                    "{qid} Q0 {} {} {} {}",
                    d.docno,
                    i + 1,
                    d.score,
                    self.tag
                )
                .expect("write to String");
            }
        }
        out
    }

    pub fn parse_trec(input: &[u8]) -> Result<Self> {
        let src = std::str::from_utf8(input).map_err(|e| Error::ParseAt {
            offset: e.valid_up_to(),
            message: "invalid UTF-8".into(),
        })?;
        let mut tag: Option<String> = None;
        let mut rows: BTreeMap<String, Vec<(usize, String, S, usize)>> = BTreeMap::new();
        for (i, line) in src.lines().enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let bad = |message: &str| Error::ParseLine {
                line: i + 1,
                message: message.into(),
            };
            let [qid, _q0, docno, rank, score, run_tag] = fields[..] else {
                return Err(bad("expected `qid Q0 docno rank score tag`"));
            };
            let rank: usize = rank.parse().map_err(|_| bad("rank is not an integer"))?;
            let score: S = score.parse().map_err(|_| bad("score is not a number"))?;
            if !score.is_finite() {
                return Err(bad("non-finite score"));
            }
            match &tag {
                None => tag = Some(run_tag.to_string()),
                Some(t) if t != run_tag => return Err(bad("mixed run tags")),
                _ => {}
            }
            rows.entry(qid.to_string())
                .or_default()
                .push((rank, docno.to_string(), score, i + 1));
        }
        let mut run = RunResult::new(tag.unwrap_or_default());
        for (qid, mut list) in rows {
            list.sort_by_key(|r| r.0);
            let mut seen = HashSet::new();
            for (expected, (rank, docno, _, line)) in list.iter().enumerate() {
                if *rank != expected + 1 {
                    return Err(Error::ParseLine {
                        line: *line,
                        message: format!("ranks for query {qid} are not contiguous from 1"),
                    });
                }
                if !seen.insert(docno.clone()) {
                    return Err(Error::ParseLine {
                        line: *line,
                        message: format!("document {docno} repeated for query {qid}"),
                    });
                }
            }
            run.insert(
                qid,
                list.into_iter()
                    .map(|(_, docno, score, _)| ScoredDoc { docno, score })
                    .collect(),
            );
        }
        Ok(run)
    }
}

/// Uninterpolated average precision over `R` relevant documents; `None` when `R = 0`.
pub fn average_precision<S: Scalar, D: AsRef<str>>(
    ranked: &[D],
    qrels: &Qrels,
    qid: &str,
) -> Option<S> {
    let r = qrels.num_relevant(qid);
    if r == 0 {
        return None;
    }
    let mut hits = 0u64;
    let mut sum = S::zero();
    for (i, docno) in ranked.iter().enumerate() {
        if qrels.is_relevant(qid, docno.as_ref()) {
            hits += 1;
            sum = sum + S::from_count(hits) / S::from_count(i as u64 + 1);
        }
    }
    Some(sum / S::from_count(r as u64))
}

/// Relevant documents among the first `cutoff`, divided by `cutoff`.
pub fn precision_at<S: Scalar, D: AsRef<str>>(
    ranked: &[D],
    qrels: &Qrels,
    qid: &str,
    cutoff: usize,
) -> S {
    if cutoff == 0 {
        return S::zero();
    }
    let hits = ranked
        .iter()
        .take(cutoff)
        .filter(|d| qrels.is_relevant(qid, d.as_ref()))
        .count();
    S::from_count(hits as u64) / S::from_count(cutoff as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryEval<S> {
    pub qid: String,
    pub ap: S,
    pub p10: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<S> {
    pub per_query: Vec<QueryEval<S>>,
    pub map: S,
    pub p10: S,
    /// Queries left out because they have no relevant documents.
    pub excluded: Vec<String>,
}

impl<S: Scalar> EvalReport<S> {
    pub fn aps(&self) -> Vec<S> {
        self.per_query.iter().map(|q| q.ap).collect()
    }

    pub fn p10s(&self) -> Vec<S> {
        self.per_query.iter().map(|q| q.p10).collect()
    }
}

/// Evaluates `run` on `qids` (in that order). Queries missing from the run score 0.
pub fn evaluate<S: Scalar>(run: &RunResult<S>, qrels: &Qrels, qids: &[String]) -> EvalReport<S> {
    let mut per_query = Vec::with_capacity(qids.len());
    let mut excluded = Vec::new();
    for qid in qids {
        let docnos: Vec<&str> = run.get(qid).iter().map(|d| d.docno.as_str()).collect();
        match average_precision::<S, _>(&docnos, qrels, qid) {
            Some(ap) => per_query.push(QueryEval {
                qid: qid.clone(),
                ap,
                p10: precision_at(&docnos, qrels, qid, 10),
            }),
            None => excluded.push(qid.clone()),
        }
    }
    let mean = |xs: &mut dyn Iterator<Item = S>| {
        if per_query.is_empty() {
            S::zero()
        } else {
            xs.fold(S::zero(), |a, b| a + b) / S::from_count(per_query.len() as u64)
        }
    };
    let map = mean(&mut per_query.iter().map(|q| q.ap));
    let p10 = mean(&mut per_query.iter().map(|q| q.p10));
    EvalReport {
        per_query,
        map,
        p10,
        excluded,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult<S> {
    /// Non-zero differences used by the test.
    pub n: usize,
    /// Sum of ranks of positive differences (treatment above baseline).
    pub w_plus: S,
    pub w_minus: S,
    /// `P(W+ >= observed)` under the null.
    pub p_greater: S,
    /// `P(W+ <= observed)` under the null.
    pub p_less: S,
    pub p_two_sided: S,
    pub exact: bool,
    /// All differences were zero; p-values are 1.
    pub degenerate: bool,
}

impl<S: Scalar> WilcoxonResult<S> {
    /// One-sided p-value in the direction of the observed effect.
    pub fn p_one_sided(&self) -> S {
        self.p_greater.min(self.p_less)
    }
}

/// 1-based ranks of `values`, ties receiving the mean of the positions they span.
pub fn average_ranks<S: Scalar>(values: &[S]) -> Vec<f64> {
    doubled_ranks(values)
        .into_iter()
        .map(|r| r as f64 / 2.0)
        .collect()
}

// Twice the average rank, which is always an integer.
fn doubled_ranks<S: Scalar>(values: &[S]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0u64; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let doubled = (i + 1 + j + 1) as u64;
        for &k in &order[i..=j] {
            ranks[k] = doubled;
        }
        i = j + 1;
    }
    ranks
}

/// Wilcoxon matched-pairs signed-ranks test on `treatment − baseline`.
///
/// Zero differences are dropped and tied magnitudes share average ranks. The null
/// distribution is counted exactly for up to [`WILCOXON_EXACT_MAX`] pairs; beyond
/// that a tie-corrected normal approximation with continuity correction is used.
pub fn wilcoxon_signed_rank<S: Scalar>(
    baseline: &[S],
    treatment: &[S],
) -> Result<WilcoxonResult<S>> {
    if baseline.len() != treatment.len() {
        return Err(Error::Invalid(format!(
            "paired samples differ in length ({} vs {})",
            baseline.len(),
            treatment.len()
        )));
    }
    if baseline.iter().chain(treatment).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("paired samples must be finite".into()));
    }
    let diffs: Vec<S> = treatment
        .iter()
        .zip(baseline)
        .map(|(&t, &b)| t - b)
        .filter(|d| *d != S::zero())
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            n: 0,
            w_plus: S::zero(),
            w_minus: S::zero(),
            p_greater: S::one(),
            p_less: S::one(),
            p_two_sided: S::one(),
            exact: true,
            degenerate: true,
        });
    }
    let magnitudes: Vec<S> = diffs.iter().map(|d| d.abs()).collect();
    let ranks2 = doubled_ranks(&magnitudes);
    let total2: u64 = ranks2.iter().sum();
    let w_plus2: u64 = ranks2
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > S::zero())
        .map(|(r, _)| *r)
        .sum();

    let (p_greater, p_less, exact) = if n <= WILCOXON_EXACT_MAX {
        // counts[s] = number of sign assignments whose doubled W+ equals s
        let mut counts = vec![0u64; total2 as usize + 1];
        counts[0] = 1;
        let mut reach = 0usize;
        for &r in &ranks2 {
            let r = r as usize;
            for s in (0..=reach).rev() {
                if counts[s] != 0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let all = (1u64 << n) as f64;
        let ge: u64 = counts[w_plus2 as usize..].iter().sum();
        let le: u64 = counts[..=w_plus2 as usize].iter().sum();
        (ge as f64 / all, le as f64 / all, true)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let mut tie_term = 0.0;
        let mut sorted = ranks2.clone();
        sorted.sort_unstable();
        for group in sorted.chunk_by(|a, b| a == b) {
            let t = group.len() as f64;
            tie_term += t * t * t - t;
        }
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let sd = var.sqrt();
        let w = w_plus2 as f64 / 2.0;
        let normal = Normal::standard();
        let p_greater = 1.0 - normal.cdf((w - mean - 0.5) / sd);
        let p_less = normal.cdf((w - mean + 0.5) / sd);
        (p_greater.min(1.0), p_less.min(1.0), false)
    };
    let two = (2.0 * p_greater.min(p_less)).min(1.0);
    Ok(WilcoxonResult {
        n,
        w_plus: S::lit(w_plus2 as f64 / 2.0),
        w_minus: S::lit((total2 - w_plus2) as f64 / 2.0),
        p_greater: S::lit(p_greater),
        p_less: S::lit(p_less),
        p_two_sided: S::lit(two),
        exact,
        degenerate: false,
    })
}

/// `**` below 0.01, `*` below 0.05, otherwise empty.
pub fn significance_marker<S: Scalar>(p: S) -> &'static str {
    if p < S::lit(0.01) {
        "**"
    } else if p < S::lit(0.05) {
        "*"
    } else {
        ""
    }
}

/// Spearman's ρ over paired samples: Pearson correlation of average ranks.
pub fn spearman_rho_paired<S: Scalar>(a: &[S], b: &[S]) -> Result<S> {
    if a.len() != b.len() {
        return Err(Error::Invalid(
            "rank correlation needs paired samples".into(),
        ));
    }
    if a.len() < 3 {
        return Err(Error::Invalid(format!(
            "rank correlation needs at least 3 common items, got {}",
            a.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Invalid(
            "rank correlation needs finite values".into(),
        ));
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - mean) * (y - mean);
        va += (x - mean) * (x - mean);
        vb += (y - mean) * (y - mean);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::Invalid(
            "rank correlation undefined for constant values".into(),
        ));
    }
    Ok(S::lit((cov / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0)))
}

/// Spearman's ρ over the keys two tables share.
pub fn spearman_rho<S: Scalar>(a: &HashMap<String, S>, b: &HashMap<String, S>) -> Result<S> {
    let mut keys: Vec<&String> = a.keys().filter(|k| b.contains_key(*k)).collect();
    keys.sort();
    let xs: Vec<S> = keys.iter().map(|k| a[*k]).collect();
    let ys: Vec<S> = keys.iter().map(|k| b[*k]).collect();
    spearman_rho_paired(&xs, &ys)
}
