mod common;

use std::collections::BTreeMap;

use posweight::integrate::{retrieve_integrated, IntegrationConfig};
use posweight::models::{retrieve, ModelParams};
use posweight::weights::WeightTable;
use posweight::{
    InvertedIndex, Model, Normalizer, PosNgramStats, Query, TagSet, WeightKind, WindowLength,
};
use posweight_oracle::synth::{random_collection, random_tagged_corpus, rng};
use posweight_oracle::{brute_score, brute_weights, BruteParams};

use common::{surfaces, to_raw, to_tagged, token_lists};

fn assert_close(
    expected: &BTreeMap<String, f64>,
    actual: &BTreeMap<String, f64>,
    tol: f64,
    what: &str,
) {
    assert_eq!(
        expected.keys().collect::<Vec<_>>(),
        actual.keys().collect::<Vec<_>>(),
        "{what}: key sets differ"
    );
    for (k, e) in expected {
        let a = actual[k];
        assert!((e - a).abs() <= tol, "{what}: {k}: expected {e}, got {a}");
    }
}

#[test]
fn weights_match_enumeration() {
    let mut r = rng(0x5eed);
    for case in 0..120 {
        let n = [2, 3, 4][case % 3];
        let docs = random_tagged_corpus(&mut r, 50, 30);
        let stats = PosNgramStats::from_documents(
            &to_tagged(&docs),
            WindowLength::new(n).unwrap(),
            TagSet::default(),
            &Normalizer::default(),
        );
        for kind in WeightKind::ALL {
            let expected = brute_weights(&token_lists(&docs), n, kind.name());
            let table = WeightTable::<f64>::build(&stats, kind);
            let actual: BTreeMap<String, f64> =
                table.iter().map(|(t, v)| (t.to_string(), v)).collect();
            assert_close(
                &expected,
                &actual,
                1e-9,
                &format!("case {case} n={n} {kind}"),
            );
        }
    }
}

fn oracle_params(p: &ModelParams<f64>) -> BruteParams {
    BruteParams {
        k1: p.bm25.k1,
        b: p.bm25.b,
        k3: p.bm25.k3,
        mu: p.mu,
        slope: p.slope,
    }
}

#[test]
fn scores_match_direct_evaluation() {
    for seed in 0..100u64 {
        let coll = random_collection(seed, 20, 6);
        let index = InvertedIndex::build_raw(&to_raw(&coll.docs), Normalizer::default()).unwrap();
        let raw = surfaces(&coll.docs);
        let stats = PosNgramStats::from_documents(
            &to_tagged(&coll.docs),
            WindowLength::default(),
            TagSet::default(),
            &Normalizer::default(),
        );
        let kind = WeightKind::ALL[seed as usize % 5];
        let table = WeightTable::<f64>::build(&stats, kind);
        let weights = brute_weights(&token_lists(&coll.docs), 4, kind.name());
        let params = ModelParams::<f64>::default().with_mu([2500.0, 100.0, 7.0][seed as usize % 3]);
        for (qid, terms) in &coll.queries {
            let q = Query {
                qid: qid.clone(),
                terms: terms.clone(),
            };
            for model in Model::ALL {
                let expected = brute_score(model.name(), terms, &raw, oracle_params(&params), None);
                let actual: BTreeMap<String, f64> =
                    retrieve(&q, &index, model, &params, usize::MAX)
                        .into_iter()
                        .map(|d| (d.docno, d.score))
                        .collect();
                assert_close(
                    &expected,
                    &actual,
                    1e-9,
                    &format!("seed {seed} {model} q{qid}"),
                );

                let w = 2.5;
                let expected = brute_score(
                    model.name(),
                    terms,
                    &raw,
                    oracle_params(&params),
                    Some((w, &weights)),
                );
                let cfg = IntegrationConfig::new(w, &table).unwrap();
                let actual: BTreeMap<String, f64> =
                    retrieve_integrated(&q, &index, model, &params, &cfg, usize::MAX)
                        .into_iter()
                        .map(|d| (d.docno, d.score))
                        .collect();
                assert_close(
                    &expected,
                    &actual,
                    1e-9,
                    &format!("seed {seed} {model}+{kind} q{qid}"),
                );
            }
        }
    }
}
