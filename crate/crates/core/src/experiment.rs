//! Batch retrieval, parameter sweeps, train/test selection and weight/IDF
//! correlation, with their TSV and plain-text reports.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::corpus::{Qrels, Query, TaggedDocument};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate, significance_marker, spearman_rho, wilcoxon_signed_rank, EvalReport, RunResult,
};
use crate::index::{IndexBuilder, InvertedIndex};
use crate::integrate::{retrieve_integrated, IntegrationConfig};
use crate::models::{retrieve, Model, ModelParams};
use crate::posstats::{PosNgramStats, WindowLength};
use crate::scalar::Scalar;
use crate::tagger::TagSet;
use crate::weights::{WeightKind, WeightTable};
use crate::Normalizer;

/// Integration strengths tried when no grid is given.
pub const DEFAULT_W_GRID: [f64; 22] = [
    0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 15.0, 20.0, 30.0, 50.0, 100.0, 200.0, 1000.0,
    2000.0, 5000.0, 10000.0, 20000.0, 25000.0, 50000.0,
];

pub fn default_w_grid<S: Scalar>() -> Vec<S> {
    DEFAULT_W_GRID.iter().map(|&w| S::lit(w)).collect()
}

/// Index and POS statistics built from one tagged collection.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub index: InvertedIndex,
    pub stats: PosNgramStats,
}

/// Builds the index and POS statistics in parallel shards merged in document order,
/// so the result does not depend on the number of threads.
pub fn build_artifacts(
    docs: &[TaggedDocument],
    n: WindowLength,
    tagset: TagSet,
    normalizer: Normalizer,
    stopwords: &[String],
) -> Result<Artifacts> {
    let shards: Vec<IndexBuilder> = docs
        .par_chunks(512)
        .map(|chunk| {
            let mut b = IndexBuilder::new(normalizer).with_stopwords(stopwords);
            for d in chunk {
                b.add_tagged(d)?;
            }
            Ok(b)
        })
        .collect::<Result<_>>()?;
    let mut builder = IndexBuilder::new(normalizer).with_stopwords(stopwords);
    for shard in shards {
        builder.merge(shard)?;
    }
    let stats = PosNgramStats::from_documents_par(docs, n, tagset, &normalizer);
    Ok(Artifacts {
        index: builder.finish(),
        stats,
    })
}

/// The `N / unique terms / POS n-gram types` line describing a collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollectionSummary {
    pub num_docs: usize,
    pub unique_terms: usize,
    pub total_tokens: u64,
    pub n: usize,
    pub ngram_types: u64,
}

impl CollectionSummary {
    pub fn of(artifacts: &Artifacts) -> Self {
        Self {
            num_docs: artifacts.index.num_docs(),
            unique_terms: artifacts.index.vocabulary_size(),
            total_tokens: artifacts.index.total_tokens(),
            n: artifacts.stats.n().get(),
            ngram_types: artifacts.stats.distinct_types(),
        }
    }
}

impl std::fmt::Display for CollectionSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "documents\t{}", self.num_docs)?;
        writeln!(f, "terms (total)\t{}", self.total_tokens)?;
        writeln!(f, "terms (unique)\t{}", self.unique_terms)?;
        writeln!(f, "POS {}-grams\t{}", self.n, self.ngram_types)
    }
}

/// Retrieves every query (in parallel) and collects the rankings in one run.
///
/// With `integration = None` this is the baseline model.
pub fn run_queries<S: Scalar>(
    queries: &[Query],
    index: &InvertedIndex,
    model: Model,
    params: &ModelParams<S>,
    integration: Option<&IntegrationConfig<'_, S>>,
    depth: usize,
    tag: &str,
) -> RunResult<S> {
    let ranked: Vec<_> = queries
        .par_iter()
        .map(|q| match integration {
            Some(cfg) => retrieve_integrated(q, index, model, params, cfg, depth),
            None => retrieve(q, index, model, params, depth),
        })
        .collect();
    let mut run = RunResult::new(tag);
    for (q, r) in queries.iter().zip(ranked) {
        run.insert(q.qid.clone(), r);
    }
    run
}

/// Percent change from `base` to `value`: exactly 0 when they are equal, `None`
/// when the base is 0 and they differ.
pub fn percent_delta<S: Scalar>(base: S, value: S) -> Option<S> {
    if value == base {
        Some(S::zero())
    } else if base == S::zero() {
        None
    } else {
        Some(S::lit(100.0) * (value - base) / base)
    }
}

/// One metric of a treatment compared with the baseline on the same queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricComparison<S> {
    pub value: S,
    pub delta_percent: Option<S>,
    /// Two-sided Wilcoxon p-value over per-query values.
    pub p_value: S,
}

impl<S: Scalar> MetricComparison<S> {
    pub fn compare(base: &[S], treatment: &[S], base_mean: S, treatment_mean: S) -> Result<Self> {
        let test = wilcoxon_signed_rank(base, treatment)?;
        Ok(Self {
            value: treatment_mean,
            delta_percent: percent_delta(base_mean, treatment_mean),
            p_value: test.p_two_sided,
        })
    }

    pub fn marker(&self) -> &'static str {
        significance_marker(self.p_value)
    }

    fn delta_text(&self) -> String {
        match self.delta_percent {
            Some(d) => format!("{:+.2}%", d.to_f64_lossy()),
            None => "n/a".into(),
        }
    }
}

/// MAP and P@10 of `treatment` against `baseline`.
pub fn compare_reports<S: Scalar>(
    baseline: &EvalReport<S>,
    treatment: &EvalReport<S>,
) -> Result<(MetricComparison<S>, MetricComparison<S>)> {
    let same_queries = baseline.per_query.len() == treatment.per_query.len()
        && baseline
            .per_query
            .iter()
            .zip(&treatment.per_query)
            .all(|(a, b)| a.qid == b.qid);
    if !same_queries {
        return Err(Error::Invalid(
            "compared runs cover different queries".into(),
        ));
    }
    Ok((
        MetricComparison::compare(
            &baseline.aps(),
            &treatment.aps(),
            baseline.map,
            treatment.map,
        )?,
        MetricComparison::compare(
            &baseline.p10s(),
            &treatment.p10s(),
            baseline.p10,
            treatment.p10,
        )?,
    ))
}

/// What a sweep varies.
#[derive(Debug, Clone)]
pub struct SweepSpec<S> {
    pub model: Model,
    pub params: ModelParams<S>,
    pub weights: Vec<WeightKind>,
    pub w_grid: Vec<S>,
    /// Dirichlet `mu` values; empty means just `params.mu`.
    pub mu_grid: Vec<S>,
    pub depth: usize,
}

impl<S: Scalar> SweepSpec<S> {
    pub fn validate(&self) -> Result<()> {
        if self.w_grid.is_empty() {
            return Err(Error::Config("w grid is empty".into()));
        }
        if let Some(w) = self
            .w_grid
            .iter()
            .find(|w| !w.is_finite() || **w < S::zero())
        {
            return Err(Error::Config(format!(
                "w grid value {w} must be finite and non-negative"
            )));
        }
        if self.weights.is_empty() {
            return Err(Error::Config("no weight kinds to sweep".into()));
        }
        if self.model != Model::Dirichlet && self.mu_grid.len() > 1 {
            return Err(Error::Config(format!(
                "a mu grid only applies to dirichlet, not {}",
                self.model
            )));
        }
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        for &mu in &self.mu_grid {
            self.params.with_mu(mu).validate()?;
        }
        self.params.validate()
    }

    fn mus(&self) -> Vec<S> {
        if self.mu_grid.is_empty() || self.model != Model::Dirichlet {
            vec![self.params.mu]
        } else {
            self.mu_grid.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow<S> {
    pub weight: WeightKind,
    pub mu: S,
    pub w: S,
    pub eval: EvalReport<S>,
    pub map: MetricComparison<S>,
    pub p10: MetricComparison<S>,
    pub best_map: bool,
    pub best_p10: bool,
}

#[derive(Debug, Clone)]
pub struct SweepReport<S> {
    pub model: Model,
    /// Baseline evaluation for each `mu` (a single entry for other models).
    pub baselines: Vec<(S, EvalReport<S>)>,
    /// Ordered by weight kind, then `mu`, then `w`, in the order given.
    pub rows: Vec<SweepRow<S>>,
}

/// Evaluates every (weight, mu, w) point against the baseline of the same `mu`.
pub fn sweep<S: Scalar>(
    spec: &SweepSpec<S>,
    queries: &[Query],
    qrels: &Qrels,
    artifacts: &Artifacts,
) -> Result<SweepReport<S>> {
    spec.validate()?;
    let qids: Vec<String> = queries.iter().map(|q| q.qid.clone()).collect();
    let index = &artifacts.index;
    let mus = spec.mus();
    let tables: Vec<WeightTable<S>> = spec
        .weights
        .par_iter()
        .map(|&k| WeightTable::build(&artifacts.stats, k))
        .collect();

    let baselines: Vec<(S, EvalReport<S>)> = mus
        .par_iter()
        .map(|&mu| {
            let params = spec.params.with_mu(mu);
            let run = run_queries(
                queries,
                index,
                spec.model,
                &params,
                None,
                spec.depth,
                spec.model.name(),
            );
            (mu, evaluate(&run, qrels, &qids))
        })
        .collect();

    let points: Vec<(usize, usize, S)> = (0..tables.len())
        .flat_map(|t| (0..mus.len()).flat_map(move |m| spec.w_grid.iter().map(move |&w| (t, m, w))))
        .collect();
    let mut rows: Vec<SweepRow<S>> = points
        .par_iter()
        .map(|&(t, m, w)| {
            let params = spec.params.with_mu(mus[m]);
            let cfg = IntegrationConfig::new(w, &tables[t])?;
            let run = run_queries(
                queries,
                index,
                spec.model,
                &params,
                Some(&cfg),
                spec.depth,
                spec.model.name(),
            );
            let eval = evaluate(&run, qrels, &qids);
            let (map, p10) = compare_reports(&baselines[m].1, &eval)?;
            Ok(SweepRow {
                weight: tables[t].kind(),
                mu: mus[m],
                w,
                eval,
                map,
                p10,
                best_map: false,
                best_p10: false,
            })
        })
        .collect::<Result<_>>()?;

    // best row per (weight, mu) series; the first grid value wins ties
    for series in rows.chunks_mut(spec.w_grid.len()) {
        let best = |key: fn(&SweepRow<S>) -> S| {
            let mut best = 0;
            for (i, r) in series.iter().enumerate() {
                if key(r) > key(&series[best]) {
                    best = i;
                }
            }
            best
        };
        let bm = best(|r| r.map.value);
        let bp = best(|r| r.p10.value);
        series[bm].best_map = true;
        series[bp].best_p10 = true;
    }
    Ok(SweepReport {
        model: spec.model,
        baselines,
        rows,
    })
}

impl<S: Scalar> SweepReport<S> {
    pub fn rows_for(&self, weight: WeightKind, mu: S) -> impl Iterator<Item = &SweepRow<S>> {
        self.rows
            .iter()
            .filter(move |r| r.weight == weight && r.mu == mu)
    }

    /// Every grid point, one line each.
    pub fn to_tsv(&self) -> String {
        let mut out =
            String::from("model\tweight\tmu\tw\tMAP\tdMAP%\tsigMAP\tP10\tdP10%\tsigP10\tbest\n");
        for (mu, base) in &self.baselines {
            writeln!(
                out,
                "{}\tbaseline\t{}\t-\t{:.4}\t-\t\t{:.4}\t-\t\t",
                self.model,
                self.mu_text(*mu),
                base.map.to_f64_lossy(),
                base.p10.to_f64_lossy()
            )
            .unwrap();
        }
        for r in &self.rows {
            let best = match (r.best_map, r.best_p10) {
                (true, true) => "MAP,P10",
                (true, false) => "MAP",
                (false, true) => "P10",
                (false, false) => "",
            };
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:.4}\t{}\t{}\t{:.4}\t{}\t{}\t{}",
                self.model,
                r.weight,
                self.mu_text(r.mu),
                r.w,
                r.map.value.to_f64_lossy(),
                r.map.delta_text(),
                r.map.marker(),
                r.p10.value.to_f64_lossy(),
                r.p10.delta_text(),
                r.p10.marker(),
                best
            )
            .unwrap();
        }
        out
    }

    fn mu_text(&self, mu: S) -> String {
        if self.model == Model::Dirichlet {
            mu.to_string()
        } else {
            "-".into()
        }
    }

    /// Baseline row followed by the best-`w` row of each weight, per `mu`.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        for (mu, base) in &self.baselines {
            if self.model == Model::Dirichlet {
                writeln!(out, "{} (mu = {})", self.model, mu).unwrap();
            } else {
                writeln!(out, "{}", self.model).unwrap();
            }
            writeln!(
                out,
                "{:<16} {:>8} {:>7} {:>9} {:<2}  {:>8} {:>7} {:>9} {:<2}",
                "weight", "w(MAP)", "MAP", "dMAP", "", "w(P10)", "P@10", "dP10", ""
            )
            .unwrap();
            writeln!(
                out,
                "{:<16} {:>8} {:>7.4} {:>9} {:<2}  {:>8} {:>7.4} {:>9} {:<2}",
                "baseline",
                "-",
                base.map.to_f64_lossy(),
                "",
                "",
                "-",
                base.p10.to_f64_lossy(),
                "",
                ""
            )
            .unwrap();
            let kinds: Vec<WeightKind> = self
                .rows
                .iter()
                .map(|r| r.weight)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            for kind in WeightKind::ALL.into_iter().filter(|k| kinds.contains(k)) {
                let series: Vec<&SweepRow<S>> = self.rows_for(kind, *mu).collect();
                let (Some(bm), Some(bp)) = (
                    series.iter().find(|r| r.best_map),
                    series.iter().find(|r| r.best_p10),
                ) else {
                    continue;
                };
                writeln!(
                    out,
                    "{:<16} {:>8} {:>7.4} {:>9} {:<2}  {:>8} {:>7.4} {:>9} {:<2}",
                    kind.name(),
                    bm.w.to_string(),
                    bm.map.value.to_f64_lossy(),
                    bm.map.delta_text(),
                    bm.map.marker(),
                    bp.w.to_string(),
                    bp.p10.value.to_f64_lossy(),
                    bp.p10.delta_text(),
                    bp.p10.marker()
                )
                .unwrap();
            }
            out.push('\n');
        }
        out.push_str("* p < 0.05, ** p < 0.01 (Wilcoxon signed-rank, two-sided)\n");
        out
    }
}

/// How two query-id sets relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    Disjoint,
    /// Train and test are the same set, which is allowed as a smoke test.
    Identical,
}

pub fn check_split(train: &[String], test: &[String]) -> Result<SplitKind> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::Config(
            "train and test query sets must both be non-empty".into(),
        ));
    }
    let a: BTreeSet<&String> = train.iter().collect();
    let b: BTreeSet<&String> = test.iter().collect();
    if a.len() != train.len() || b.len() != test.len() {
        return Err(Error::Config(
            "duplicate query id in train/test split".into(),
        ));
    }
    if a == b {
        return Ok(SplitKind::Identical);
    }
    let shared: Vec<&&String> = a.intersection(&b).collect();
    if shared.is_empty() {
        Ok(SplitKind::Disjoint)
    } else {
        Err(Error::Config(format!(
            "train and test query sets overlap in {} ids (first: {})",
            shared.len(),
            shared[0]
        )))
    }
}

/// Test-set value at the trained `w` and at the test-optimal `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection<S> {
    pub w_trained: S,
    pub trained: MetricComparison<S>,
    pub w_best: S,
    pub best: MetricComparison<S>,
}

#[derive(Debug, Clone)]
pub struct TrainTestRow<S> {
    pub weight: WeightKind,
    pub map: Selection<S>,
    pub p10: Selection<S>,
}

#[derive(Debug, Clone)]
pub struct TrainTestReport<S> {
    pub model: Model,
    pub split: SplitKind,
    pub baseline_test: EvalReport<S>,
    pub rows: Vec<TrainTestRow<S>>,
}

fn argmax<S: Scalar>(values: &[S]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Picks `w` on the training queries and reports the test queries at that `w`
/// and at the `w` that would have been best on test.
pub fn train_test<S: Scalar>(
    spec: &SweepSpec<S>,
    queries: &[Query],
    qrels: &Qrels,
    artifacts: &Artifacts,
    train: &[String],
    test: &[String],
) -> Result<TrainTestReport<S>> {
    spec.validate()?;
    if spec.mu_grid.len() > 1 {
        return Err(Error::Config(
            "train/test selection takes a single mu".into(),
        ));
    }
    let split = check_split(train, test)?;
    let known: HashMap<&str, &Query> = queries.iter().map(|q| (q.qid.as_str(), q)).collect();
    let pick = |ids: &[String]| -> Result<Vec<Query>> {
        ids.iter()
            .map(|id| {
                known
                    .get(id.as_str())
                    .map(|q| (*q).clone())
                    .ok_or_else(|| Error::Config(format!("query {id} is not in the topics file")))
            })
            .collect()
    };
    let train_q = pick(train)?;
    let test_q = pick(test)?;
    let mut spec = spec.clone();
    if let Some(&mu) = spec.mu_grid.first() {
        spec.params = spec.params.with_mu(mu);
        spec.mu_grid.clear();
    }
    let on_train = sweep(&spec, &train_q, qrels, artifacts)?;
    let on_test = sweep(&spec, &test_q, qrels, artifacts)?;
    let mu = spec.params.mu;
    let rows = spec
        .weights
        .iter()
        .map(|&kind| {
            let tr: Vec<&SweepRow<S>> = on_train.rows_for(kind, mu).collect();
            let te: Vec<&SweepRow<S>> = on_test.rows_for(kind, mu).collect();
            let select = |metric: fn(&SweepRow<S>) -> MetricComparison<S>| {
                let t = argmax(&tr.iter().map(|r| metric(r).value).collect::<Vec<_>>());
                let b = argmax(&te.iter().map(|r| metric(r).value).collect::<Vec<_>>());
                Selection {
                    w_trained: te[t].w,
                    trained: metric(te[t]),
                    w_best: te[b].w,
                    best: metric(te[b]),
                }
            };
            TrainTestRow {
                weight: kind,
                map: select(|r| r.map),
                p10: select(|r| r.p10),
            }
        })
        .collect();
    Ok(TrainTestReport {
        model: spec.model,
        split,
        baseline_test: on_test.baselines.into_iter().next().expect("one mu").1,
        rows,
    })
}

impl<S: Scalar> TrainTestReport<S> {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("model\tweight\tmetric\tbaseline\tw_t\ttest_at_w_t\td%_t\tsig_t\tw_b\ttest_at_w_b\td%_b\tsig_b\n");
        for r in &self.rows {
            for (name, sel, base) in [
                ("MAP", &r.map, self.baseline_test.map),
                ("P10", &r.p10, self.baseline_test.p10),
            ] {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{:.4}\t{}\t{:.4}\t{}\t{}\t{}\t{:.4}\t{}\t{}",
                    self.model,
                    r.weight,
                    name,
                    base.to_f64_lossy(),
                    sel.w_trained,
                    sel.trained.value.to_f64_lossy(),
                    sel.trained.delta_text(),
                    sel.trained.marker(),
                    sel.w_best,
                    sel.best.value.to_f64_lossy(),
                    sel.best.delta_text(),
                    sel.best.marker()
                )
                .unwrap();
            }
        }
        out
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        if self.split == SplitKind::Identical {
            out.push_str("note: train and test sets are identical\n");
        }
        writeln!(
            out,
            "{} baseline on test: MAP {:.4}  P@10 {:.4}",
            self.model,
            self.baseline_test.map.to_f64_lossy(),
            self.baseline_test.p10.to_f64_lossy()
        )
        .unwrap();
        writeln!(
            out,
            "{:<16} {:>8} {:>7} {:<2} {:>8} {:>7} {:<2}  {:>8} {:>7} {:<2} {:>8} {:>7} {:<2}",
            "weight",
            "w^t",
            "MAP^t",
            "",
            "w^b",
            "MAP^b",
            "",
            "w^t",
            "P10^t",
            "",
            "w^b",
            "P10^b",
            ""
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<16} {:>8} {:>7.4} {:<2} {:>8} {:>7.4} {:<2}  {:>8} {:>7.4} {:<2} {:>8} {:>7.4} {:<2}",
                r.weight.name(),
                r.map.w_trained.to_string(),
                r.map.trained.value.to_f64_lossy(),
                r.map.trained.marker(),
                r.map.w_best.to_string(),
                r.map.best.value.to_f64_lossy(),
                r.map.best.marker(),
                r.p10.w_trained.to_string(),
                r.p10.trained.value.to_f64_lossy(),
                r.p10.trained.marker(),
                r.p10.w_best.to_string(),
                r.p10.best.value.to_f64_lossy(),
                r.p10.best.marker()
            )
            .unwrap();
        }
        out
    }
}

/// Document IDF `ln(N / df)` for every indexed term.
pub fn document_idf<S: Scalar>(index: &InvertedIndex) -> HashMap<String, S> {
    let n = S::from_count(index.num_docs() as u64);
    index
        .terms()
        .map(|t| (t.to_string(), (n / S::from_count(index.df(t))).ln()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correlation<S> {
    pub weight: WeightKind,
    pub rho: S,
    pub shared_terms: usize,
}

/// Spearman's ρ of each weight against document IDF over the terms both know.
pub fn correlate<S: Scalar>(
    artifacts: &Artifacts,
    kinds: &[WeightKind],
) -> Result<Vec<Correlation<S>>> {
    let idf = document_idf::<S>(&artifacts.index);
    kinds
        .iter()
        .map(|&kind| {
            let table = WeightTable::<S>::build(&artifacts.stats, kind);
            let shared_terms = table
                .values()
                .keys()
                .filter(|k| idf.contains_key(*k))
                .count();
            let rho = spearman_rho(table.values(), &idf)?;
            Ok(Correlation {
                weight: kind,
                rho,
                shared_terms,
            })
        })
        .collect()
}

pub fn correlations_tsv<S: Scalar>(rows: &[Correlation<S>]) -> String {
    let mut out = String::from("weight\tspearman_rho\tterms\n");
    for r in rows {
        writeln!(
            out,
            "{}\t{:.6}\t{}",
            r.weight,
            r.rho.to_f64_lossy(),
            r.shared_terms
        )
        .unwrap();
    }
    out
}

/// Per-query AP and P@10 followed by the means.
pub fn eval_tsv<S: Scalar>(report: &EvalReport<S>) -> String {
    let mut out = String::from("qid\tAP\tP10\n");
    for q in &report.per_query {
        writeln!(
            out,
            "{}\t{:.6}\t{:.6}",
            q.qid,
            q.ap.to_f64_lossy(),
            q.p10.to_f64_lossy()
        )
        .unwrap();
    }
    writeln!(
        out,
        "all\t{:.6}\t{:.6}",
        report.map.to_f64_lossy(),
        report.p10.to_f64_lossy()
    )
    .unwrap();
    out
}
