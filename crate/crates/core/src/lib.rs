//! Metadata-only hybrid job recommendation.
//!
//! Postings are reduced to a title-weighted composite of their structured
//! fields and indexed twice: a TF-IDF sparse index and a unit-norm dense
//! embedding matrix. Queries retrieve semantic candidates by exact cosine
//! search, are re-scored lexically, fused after per-query min-max
//! normalization, filtered, optionally re-ranked by a pair scorer,
//! deduplicated, capped per company and explained.
//!
//! - [`ingest`]: CSV loading, cleaning and composite documents
//! - [`lexical`]: TF-IDF index and sparse scoring
//! - [`embedding`]: embedders, dense index, nearest-neighbour candidates
//! - [`query`]: query normalization and filter extraction
//! - [`ranker`]: fusion, filters, re-ranking, diversity, the pipeline
//! - [`explain`]: per-result evidence
//! - [`eval`]: metadata-graded offline evaluation
//! - [`artifacts`]: on-disk build products

pub mod artifacts;
pub mod corpus;
pub mod embedding;
pub mod engine;
pub mod eval;
pub mod explain;
pub mod ingest;
pub mod lexical;
pub mod query;
pub mod ranker;
pub mod synthetic;
pub mod text;

pub use corpus::Corpus;
pub use engine::Engine;
pub use ingest::{JobPosting, PostingId};
pub use ranker::{RankerConfig, RecommendOptions, RecommendOutput, Recommendation};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Lexical(#[from] lexical::LexicalError),
    #[error(transparent)]
    Embed(#[from] embedding::EmbedError),
    #[error(transparent)]
    Rank(#[from] ranker::RankError),
    #[error(transparent)]
    Artifact(#[from] artifacts::ArtifactError),
    #[error("invalid corpus: {0}")]
    Corpus(String),
    #[error("invalid evaluation config: {0}")]
    EvalConfig(String),
}
