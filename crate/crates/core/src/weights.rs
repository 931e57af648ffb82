//! The five POS-based term weights.
//!
//! With `p(I|POS)` estimated as the share of all windows that carry `POS`,
//! `{POS}_t` the n-grams containing `t`, `pf(t) = |{POS}_t|`, `TF(t)` the number
//! of containing windows and `|C|` the number of distinct n-gram types:
//!
//! | kind              | value                                              |
//! |-------------------|----------------------------------------------------|
//! | `pos_ml_boolean`  | `Σ p(I|POS) / pf(t)`                                |
//! | `pos_ml_weighted` | `Σ p(I|POS) · c(t,POS) / TF(t)`                     |
//! | `pos_idf`         | `ln(|C| / pf(t))`                                   |
//! | `pos_ridf`        | `pos_idf(t) + ln(1 − exp(−TF(t)/|C|))`              |
//! | `pos_bs`          | `ln(1 + max(0, TF(t) − pf(t)))`                     |

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::posstats::PosNgramStats;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WeightKind {
    PosMlBoolean,
    PosMlWeighted,
    PosIdf,
    PosRidf,
    PosBs,
}

impl WeightKind {
    pub const ALL: [WeightKind; 5] = [
        WeightKind::PosMlBoolean,
        WeightKind::PosMlWeighted,
        WeightKind::PosIdf,
        WeightKind::PosRidf,
        WeightKind::PosBs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightKind::PosMlBoolean => "pos_ml_boolean",
            WeightKind::PosMlWeighted => "pos_ml_weighted",
            WeightKind::PosIdf => "pos_idf",
            WeightKind::PosRidf => "pos_ridf",
            WeightKind::PosBs => "pos_bs",
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let valid: Vec<&str> = WeightKind::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!(
                    "unknown weight {s:?}; valid weights: {}",
                    valid.join(", ")
                ))
            })
    }
}

/// How `p(POS|t)` is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlMode {
    /// Uniform over `{POS}_t`.
    Boolean,
    /// Proportional to co-occurrence counts.
    Weighted,
}

/// Total-probability weight `Σ p(I|POS) p(POS|t)`; `None` when `term` is unseen.
pub fn ml_weight<S: Scalar>(term: &str, stats: &PosNgramStats, mode: MlMode) -> Option<S> {
    let ngrams = stats.term(term)?;
    let total = S::from_count(stats.total_windows());
    let pf = S::from_count(ngrams.len() as u64);
    let tf = S::from_count(ngrams.values().sum());
    let sum = ngrams
        .iter()
        .map(|(ngram, &c)| {
            let p_informative = S::from_count(stats.ngram_count(ngram)) / total;
            let p_ngram = match mode {
                MlMode::Boolean => S::one() / pf,
                MlMode::Weighted => S::from_count(c) / tf,
            };
            p_informative * p_ngram
        })
        .fold(S::zero(), |acc, x| acc + x);
    Some(sum)
}

pub fn pos_idf<S: Scalar>(term: &str, stats: &PosNgramStats) -> Option<S> {
    let pf = stats.pf(term);
    if pf == 0 {
        return None;
    }
    Some((S::from_count(stats.distinct_types()) / S::from_count(pf)).ln())
}

/// Poisson-expected `pos_idf`: `−ln(1 − exp(−TF/|C|))`.
pub fn expected_idf<S: Scalar>(term: &str, stats: &PosNgramStats) -> Option<S> {
    let tf = stats.tf(term);
    if tf == 0 {
        return None;
    }
    let rate = S::from_count(tf) / S::from_count(stats.distinct_types());
    // 1 − e^(−x) = −expm1(−x)
    Some(-(-(-rate).exp_m1()).ln())
}

pub fn pos_ridf<S: Scalar>(term: &str, stats: &PosNgramStats) -> Option<S> {
    Some(pos_idf::<S>(term, stats)? - expected_idf::<S>(term, stats)?)
}

pub fn pos_bs<S: Scalar>(term: &str, stats: &PosNgramStats) -> Option<S> {
    let ngrams = stats.term(term)?;
    let tf: u64 = ngrams.values().sum();
    let excess = tf.saturating_sub(ngrams.len() as u64);
    Some(S::from_count(excess).ln_1p())
}

pub fn weight<S: Scalar>(kind: WeightKind, term: &str, stats: &PosNgramStats) -> Option<S> {
    match kind {
        WeightKind::PosMlBoolean => ml_weight(term, stats, MlMode::Boolean),
        WeightKind::PosMlWeighted => ml_weight(term, stats, MlMode::Weighted),
        WeightKind::PosIdf => pos_idf(term, stats),
        WeightKind::PosRidf => pos_ridf(term, stats),
        WeightKind::PosBs => pos_bs(term, stats),
    }
}

/// Precomputed weights for every term seen in the POS statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable<S> {
    kind: WeightKind,
    n: usize,
    distinct_types: u64,
    values: HashMap<String, S>,
    default_value: S,
}

impl<S: Scalar> WeightTable<S> {
    pub fn build(stats: &PosNgramStats, kind: WeightKind) -> Self {
        let values = stats
            .terms()
            .map(|t| {
                (
                    t.to_string(),
                    weight(kind, t, stats).expect("term comes from stats"),
                )
            })
            .collect();
        Self {
            kind,
            n: stats.n().get(),
            distinct_types: stats.distinct_types(),
            values,
            default_value: S::zero(),
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    /// Weight of `term`, or the default (0) for terms without POS statistics.
    pub fn get(&self, term: &str) -> S {
        self.values.get(term).copied().unwrap_or(self.default_value)
    }

    pub fn lookup(&self, term: &str) -> Option<S> {
        self.values.get(term).copied()
    }

    pub fn default_value(&self) -> S {
        self.default_value
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, S)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn values(&self) -> &HashMap<String, S> {
        &self.values
    }

    /// TSV export: a `#` header with kind, n and |C|, then `term<TAB>kind<TAB>value` sorted by term.
    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "# kind={}\tn={}\tdistinct_types={}",
            self.kind, self.n, self.distinct_types
        )?;
        let mut terms: Vec<&String> = self.values.keys().collect();
        terms.sort();
        for term in terms {
            writeln!(w, "{term}\t{}\t{}", self.kind, self.values[term])?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(Ok(h)) => h,
            Some(Err(e)) => return Err(Error::Format(e.to_string())),
            None => return Err(Error::Format("empty weight table".into())),
        };
        let mut kind = None;
        let mut n = None;
        let mut distinct_types = None;
        for field in header
            .strip_prefix("# ")
            .ok_or_else(|| Error::Format("missing weight table header".into()))?
            .split('\t')
        {
            match field.split_once('=') {
                Some(("kind", v)) => kind = Some(v.parse::<WeightKind>()?),
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("distinct_types", v)) => distinct_types = v.parse::<u64>().ok(),
                _ => return Err(Error::Format(format!("unexpected header field {field:?}"))),
            }
        }
        let (Some(kind), Some(n), Some(distinct_types)) = (kind, n, distinct_types) else {
            return Err(Error::Format("incomplete weight table header".into()));
        };
        let mut values = HashMap::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Format(e.to_string()))?;
            let bad = |message: &str| Error::ParseLine {
                line: i + 2,
                message: message.into(),
            };
            let mut fields = line.split('\t');
            let (Some(term), Some(k), Some(v), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(bad("expected term<TAB>kind<TAB>value"));
            };
            if k != kind.name() {
                return Err(bad("kind differs from header"));
            }
            let value: S = v.parse().map_err(|_| bad("value is not a number"))?;
            if !value.is_finite() {
                return Err(bad("non-finite weight"));
            }
            values.insert(term.to_string(), value);
        }
        Ok(Self {
            kind,
            n,
            distinct_types,
            values,
            default_value: S::zero(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(file))
    }
}
