//! Pair scorers: models that score a (query, document) pair jointly.
//!
//! Over HTTP a scorer is `POST <url>` with
//! `{"query": "...", "documents": ["...", ...]}` answered by
//! `{"scores": [...]}`, one score per document, higher is more relevant.

use std::collections::HashSet;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::text::tokenize;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum RerankError {
    #[error("pair scorer unavailable: {0}")]
    Unavailable(String),
    #[error("pair scorer returned {got} scores for {expected} documents")]
    CountMismatch { expected: usize, got: usize },
}

pub trait PairScorer: Send + Sync {
    fn name(&self) -> &str;

    /// One score per document, in document order.
    fn score_batch(&self, query: &str, documents: &[&str]) -> Result<Vec<f64>, RerankError>;
}

/// Token-set Jaccard overlap. Cheap, deterministic stand-in for a
/// cross-encoder.
#[derive(Debug, Clone, Copy, Default)]
pub struct JaccardPairScorer;

impl PairScorer for JaccardPairScorer {
    fn name(&self) -> &str {
        "jaccard"
    }

    fn score_batch(&self, query: &str, documents: &[&str]) -> Result<Vec<f64>, RerankError> {
        let q: HashSet<&str> = tokenize(query).into_iter().collect();
        Ok(documents
            .iter()
            .map(|doc| {
                let d: HashSet<&str> = tokenize(doc).into_iter().collect();
                let union = q.union(&d).count();
                if union == 0 {
                    0.0
                } else {
                    q.intersection(&d).count() as f64 / union as f64
                }
            })
            .collect())
    }
}

#[derive(Serialize)]
struct PairRequest<'a> {
    query: &'a str,
    documents: &'a [&'a str],
}

#[derive(Deserialize)]
struct PairResponse {
    scores: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct HttpPairScorer {
    url: String,
    client: reqwest::blocking::Client,
}

impl HttpPairScorer {
    pub fn new(url: impl Into<String>) -> Result<Self, RerankError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| RerankError::Unavailable(e.to_string()))?;
        Ok(Self {
            url: url.into(),
            client,
        })
    }
}

impl PairScorer for HttpPairScorer {
    fn name(&self) -> &str {
        &self.url
    }

    fn score_batch(&self, query: &str, documents: &[&str]) -> Result<Vec<f64>, RerankError> {
        let unavailable = |e: reqwest::Error| RerankError::Unavailable(e.to_string());
        let resp: PairResponse = self
            .client
            .post(&self.url)
            .json(&PairRequest { query, documents })
            .send()
            .map_err(unavailable)?
            .error_for_status()
            .map_err(unavailable)?
            .json()
            .map_err(unavailable)?;
        if resp.scores.len() != documents.len() {
            return Err(RerankError::CountMismatch {
                expected: documents.len(),
                got: resp.scores.len(),
            });
        }
        Ok(resp.scores)
    }
}
