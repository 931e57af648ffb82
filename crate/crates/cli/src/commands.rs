//! One function per subcommand. Reports go to `out`; warnings to stderr.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use posweight::corpus::{parse_qrels, parse_tagged, parse_topics, parse_trec_sgml};
use posweight::eval::{evaluate, RunResult};
use posweight::experiment::{
    build_artifacts, compare_reports, correlate, correlations_tsv, eval_tsv, run_queries, sweep,
    train_test, Artifacts, CollectionSummary, SweepSpec,
};
use posweight::integrate::IntegrationConfig;
use posweight::tagger::tag_fallback;
use posweight::weights::WeightTable;
use posweight::{
    CollapseMap, Error, InvertedIndex, Lexicon, Normalizer, PosNgramStats, Qrels, Query, Result,
    TaggedDocument,
};

use crate::config::{expand_ids, Options};

pub const INDEX_FILE: &str = "index.txt";
pub const STATS_FILE: &str = "posstats.txt";

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| Error::Invalid(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

// Prefixes data errors with the file they came from.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config(_) => e,
        other => Error::Invalid(format!("{}: {other}", path.display())),
    })
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::Invalid(format!("writing output: {e}")))
}

/// Reads every tagged and raw collection file named in `opts`.
pub fn load_documents(opts: &Options) -> Result<(Vec<TaggedDocument>, CollapseMap)> {
    let map = match &opts.collapse_map {
        Some(p) => in_file(p, CollapseMap::load(p))?,
        None => CollapseMap::default(),
    };
    let policy = opts.unknown_tag_policy()?;
    let mut docs = Vec::new();
    for path in opts.tagged.iter().flatten() {
        let corpus = in_file(path, parse_tagged(&read(path)?, &map, policy))?;
        for (tag, count) in &corpus.unknown_tags {
            eprintln!(
                "warning: {}: tag {tag:?} not in collapse map, {count} token(s) mapped to OTHER",
                path.display()
            );
        }
        docs.extend(corpus.docs);
    }
    if opts.corpus.as_ref().is_some_and(|c| !c.is_empty()) {
        let tagset = map.tagset().clone();
        let lexicon = match &opts.lexicon {
            Some(p) => in_file(p, Lexicon::load(p, &tagset))?,
            None => Lexicon::from_pairs([]),
        };
        for path in opts.corpus.iter().flatten() {
            for raw in in_file(path, parse_trec_sgml(&read(path)?))? {
                let tags = tag_fallback(&raw.tokens, &lexicon, &tagset);
                docs.push(TaggedDocument::new(
                    raw.docno,
                    raw.tokens.into_iter().zip(tags),
                ));
            }
        }
    }
    if opts.tagged.is_none() && opts.corpus.is_none() {
        return Err(Error::Config(
            "one of --tagged, --corpus or --index is required".into(),
        ));
    }
    Ok((docs, map))
}

fn stopwords(opts: &Options) -> Result<Vec<String>> {
    match &opts.stopwords {
        Some(p) => Ok(String::from_utf8_lossy(&read(p)?)
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect()),
        None => Ok(Vec::new()),
    }
}

/// Loads artifacts from `--index`, or builds them from the collection files.
pub fn artifacts(opts: &Options) -> Result<Artifacts> {
    if let Some(dir) = &opts.index {
        let ip = dir.join(INDEX_FILE);
        let sp = dir.join(STATS_FILE);
        return Ok(Artifacts {
            index: in_file(&ip, InvertedIndex::load(&ip))?,
            stats: in_file(&sp, PosNgramStats::load(&sp))?,
        });
    }
    let (docs, map) = load_documents(opts)?;
    let normalizer = Normalizer::new(opts.stem.unwrap_or(false));
    build_artifacts(
        &docs,
        opts.window()?,
        map.tagset().clone(),
        normalizer,
        &stopwords(opts)?,
    )
}

fn topics(opts: &Options, normalizer: &Normalizer) -> Result<Vec<Query>> {
    let p = opts.require(&opts.topics, "topics")?;
    in_file(p, parse_topics(&read(p)?, normalizer))
}

fn qrels(opts: &Options) -> Result<Qrels> {
    let p = opts.require(&opts.qrels, "qrels")?;
    in_file(p, parse_qrels(&read(p)?))
}

pub fn cmd_index(opts: &Options, out: &mut dyn Write) -> Result<()> {
    let dir = opts.require(&opts.out, "out")?;
    let art = artifacts(opts)?;
    fs::create_dir_all(dir).map_err(|e| Error::Invalid(format!("{}: {e}", dir.display())))?;
    art.index.save(&dir.join(INDEX_FILE))?;
    art.stats.save(&dir.join(STATS_FILE))?;
    emit(out, &CollectionSummary::of(&art).to_string())
}

pub fn cmd_search(opts: &Options, out: &mut dyn Write) -> Result<()> {
    let model = opts.model()?;
    let params = opts.params()?;
    let depth = opts.depth()?;
    let kinds = opts.weights(false)?;
    if kinds.len() > 1 {
        return Err(Error::Config("search takes a single --weight".into()));
    }
    let art = artifacts(opts)?;
    let queries = topics(opts, art.index.normalizer())?;
    let tag = opts
        .run_tag
        .clone()
        .unwrap_or_else(|| model.name().to_string());
    let run = match kinds.first() {
        Some(&kind) => {
            let w = *opts.require(&opts.w, "w")?;
            let table = WeightTable::build(&art.stats, kind);
            let cfg =
                IntegrationConfig::new(w, &table).map_err(|e| Error::Config(e.to_string()))?;
            run_queries(
                &queries,
                &art.index,
                model,
                &params,
                Some(&cfg),
                depth,
                &tag,
            )
        }
        None => run_queries(&queries, &art.index, model, &params, None, depth, &tag),
    };
    let qids: Vec<String> = queries.iter().map(|q| q.qid.clone()).collect();
    let text = run.to_trec(&qids);
    match &opts.out {
        Some(p) => write_file(p, &text),
        None => emit(out, &text),
    }
}

fn sweep_spec(opts: &Options) -> Result<SweepSpec<f64>> {
    let weights = opts.weights(true)?;
    if weights.is_empty() {
        return Err(Error::Config("nothing to sweep with --weight none".into()));
    }
    Ok(SweepSpec {
        model: opts.model()?,
        params: opts.params()?,
        weights,
        w_grid: opts.w_grid()?,
        mu_grid: opts.mu_grid.clone().unwrap_or_default(),
        depth: opts.depth()?,
    })
}

pub fn cmd_sweep(opts: &Options, out: &mut dyn Write) -> Result<()> {
    let spec = sweep_spec(opts)?;
    spec.validate()?;
    let art = artifacts(opts)?;
    let queries = topics(opts, art.index.normalizer())?;
    let judged = qrels(opts)?;
    let report = sweep(&spec, &queries, &judged, &art)?;
    let tsv = report.to_tsv();
    let table = report.summary_table();
    match &opts.out {
        Some(dir) => {
            write_file(&dir.join("sweep.tsv"), &tsv)?;
            write_file(&dir.join("sweep.txt"), &table)?;
            emit(out, &table)
        }
        None => emit(out, &format!("{tsv}\n{table}")),
    }
}

pub fn cmd_traintest(opts: &Options, out: &mut dyn Write) -> Result<()> {
    let spec = sweep_spec(opts)?;
    spec.validate()?;
    let train = expand_ids(opts.require(&opts.train, "train")?)?;
    let test = expand_ids(opts.require(&opts.test, "test")?)?;
    posweight::experiment::check_split(&train, &test)?;
    let art = artifacts(opts)?;
    let queries = topics(opts, art.index.normalizer())?;
    let judged = qrels(opts)?;
    let report = train_test(&spec, &queries, &judged, &art, &train, &test)?;
    let tsv = report.to_tsv();
    let table = report.table();
    match &opts.out {
        Some(dir) => {
            write_file(&dir.join("traintest.tsv"), &tsv)?;
            write_file(&dir.join("traintest.txt"), &table)?;
            emit(out, &table)
        }
        None => emit(out, &format!("{tsv}\n{table}")),
    }
}

fn read_run(path: &Path) -> Result<RunResult<f64>> {
    in_file(path, RunResult::parse_trec(&read(path)?))
}

pub fn cmd_evaluate(opts: &Options, out: &mut dyn Write) -> Result<()> {
    let run_path = opts.require(&opts.run, "run")?;
    let run = read_run(run_path)?;
    let judged = qrels(opts)?;
    let qids: Vec<String> = match &opts.topics {
        Some(_) => topics(opts, &Normalizer::default())?
            .into_iter()
            .map(|q| q.qid)
            .collect(),
        None => run
            .queries
            .keys()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    let report = evaluate(&run, &judged, &qids);
    let mut text = eval_tsv(&report);
    if let Some(bp) = &opts.baseline {
        let base = evaluate(&read_run(bp)?, &judged, &qids);
        let (map, p10) = compare_reports(&base, &report)?;
        text.push_str("\nmetric\tbaseline\trun\tdelta\tp_two_sided\tsig\n");
        for (name, b, c) in [("MAP", base.map, map), ("P10", base.p10, p10)] {
            let delta = c
                .delta_percent
                .map_or("n/a".to_string(), |d| format!("{d:+.2}%"));
            text.push_str(&format!(
                "{name}\t{b:.6}\t{:.6}\t{delta}\t{:.6}\t{}\n",
                c.value,
                c.p_value,
                c.marker()
            ));
        }
    }
    if !report.excluded.is_empty() {
        eprintln!(
            "note: {} queries without relevant documents were left out: {}",
            report.excluded.len(),
            report.excluded.join(",")
        );
    }
    match &opts.out {
        Some(p) => write_file(p, &text),
        None => emit(out, &text),
    }
}

pub fn cmd_correlate(opts: &Options, out: &mut dyn Write) -> Result<()> {
    let kinds = opts.weights(true)?;
    let art = artifacts(opts)?;
    let rows = correlate::<f64>(&art, &kinds)?;
    let text = correlations_tsv(&rows);
    match &opts.out {
        Some(p) => write_file(p, &text),
        None => emit(out, &text),
    }
}

pub fn cmd_weights_export(opts: &Options, out: &mut dyn Write) -> Result<()> {
    let kinds = opts.weights(true)?;
    if kinds.is_empty() {
        return Err(Error::Config("no weight kind to export".into()));
    }
    let art = artifacts(opts)?;
    for kind in kinds {
        let table = WeightTable::<f64>::build(&art.stats, kind);
        match &opts.out {
            Some(dir) => {
                fs::create_dir_all(dir)
                    .map_err(|e| Error::Invalid(format!("{}: {e}", dir.display())))?;
                table.save(&dir.join(format!("{kind}.tsv")))?;
            }
            None => {
                let mut buf = Vec::new();
                table
                    .write_to(&mut buf)
                    .map_err(|e| Error::Invalid(e.to_string()))?;
                out.write_all(&buf)
                    .map_err(|e| Error::Invalid(e.to_string()))?;
            }
        }
    }
    Ok(())
}
