//! Additive integration of POS-based weights into a baseline model:
//! each matched query term's contribution becomes `old + w · pos_weight(term)`.

use crate::corpus::Query;
use crate::error::{Error, Result};
use crate::index::InvertedIndex;
use crate::models::{rank, score_candidates, Model, ModelParams, ScoredDoc};
use crate::scalar::Scalar;
use crate::weights::WeightTable;

#[derive(Debug, Clone, Copy)]
pub struct IntegrationConfig<'a, S> {
    w: S,
    table: &'a WeightTable<S>,
}

impl<'a, S: Scalar> IntegrationConfig<'a, S> {
    pub fn new(w: S, table: &'a WeightTable<S>) -> Result<Self> {
        if !w.is_finite() || w < S::zero() {
            return Err(Error::Config(format!(
                "integration weight w must be finite and >= 0, got {w}"
            )));
        }
        Ok(Self { w, table })
    }

    pub fn w(&self) -> S {
        self.w
    }

    pub fn table(&self) -> &WeightTable<S> {
        self.table
    }
}

pub fn integrated_term_score<S: Scalar>(
    old_score: S,
    term: &str,
    config: &IntegrationConfig<'_, S>,
) -> S {
    let bonus = config.w * config.table.get(term);
    // a zero bonus leaves the baseline bit-for-bit intact
    if bonus == S::zero() {
        old_score
    } else {
        old_score + bonus
    }
}

/// Same candidates and tie rule as [`crate::models::retrieve`]; the bonus is added
/// once per distinct query term the document contains.
pub fn retrieve_integrated<S: Scalar>(
    query: &Query,
    index: &InvertedIndex,
    model: Model,
    params: &ModelParams<S>,
    config: &IntegrationConfig<'_, S>,
    k: usize,
) -> Vec<ScoredDoc<S>> {
    let scored = score_candidates(query, index, model, params, |term, old| {
        integrated_term_score(old, term, config)
    });
    rank(index, scored, k)
}
