//! Part-of-speech n-gram term weighting for ad-hoc retrieval.
//!
//! Terms are weighted by the POS n-gram contexts they occur in across a tagged
//! collection ([`weights`]); the weights are added to the per-term scores of a
//! baseline model ([`integrate`]) and the effect is measured with TREC-style
//! metrics and paired significance tests ([`eval`]).
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below fix the scalar to `f64`.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod index;
pub mod integrate;
pub mod models;
pub mod posstats;
pub mod scalar;
pub mod tagger;
pub mod weights;

pub use corpus::{Normalizer, Qrels, Query, RawDocument, TaggedDocument};
pub use error::{Error, Result};
pub use index::InvertedIndex;
pub use models::Model;
pub use posstats::{PosNgram, PosNgramStats, WindowLength};
pub use scalar::Scalar;
pub use tagger::{CoarseTag, CollapseMap, Lexicon, TagSet};
pub use weights::WeightKind;

pub type WeightTableF64 = weights::WeightTable<f64>;
pub type ModelParamsF64 = models::ModelParams<f64>;
pub type ScoredDocF64 = models::ScoredDoc<f64>;
pub type RunResultF64 = eval::RunResult<f64>;
pub type EvalReportF64 = eval::EvalReport<f64>;
pub type WilcoxonResultF64 = eval::WilcoxonResult<f64>;
pub type IntegrationConfigF64<'a> = integrate::IntegrationConfig<'a, f64>;
