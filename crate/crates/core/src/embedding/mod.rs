//! Dense semantic side: pluggable embedders, the unit-norm embedding matrix
//! and exact nearest-neighbour candidate retrieval.
//!
//! Every vector that reaches a [`DenseIndex`] or a query goes through
//! [`embed_texts`], which checks dimensions and L2-normalizes, so inner
//! products are cosine similarities.

mod hash;
mod provider;

pub use hash::{builtin_job_synonyms, HashEmbedder, HASH_SEED};
pub use provider::{
    external_embed, EmbeddingProvider, HttpEmbeddingProvider, ProviderBatch, ProviderEmbedder,
};

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::ingest::{CompositeDocument, PostingId};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error("embedding provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("provider returned {got} vectors for {expected} texts")]
    BatchSizeMismatch { expected: usize, got: usize },
    #[error("cannot build an index over an empty corpus")]
    EmptyCorpus,
    #[error("n_candidates must be at least 1")]
    ZeroCandidates,
}

/// A text encoder. Outputs need not be normalized; callers go through
/// [`embed_texts`] which normalizes.
pub trait Embedder: Send + Sync {
    /// Stable identifier recorded in artifacts; must change whenever the
    /// encoder's output would change.
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    /// One vector per input, in input order.
    fn encode_batch(&self, texts: &[&str]) -> Result<Vec<Vec<f32>>, EmbedError>;
}

/// Scales `v` to unit L2 norm (accumulating in f64). Zero or non-finite
/// vectors map to the basis vector e0.
pub fn l2_normalize(v: &mut [f32]) {
    let norm = v
        .iter()
        .map(|&x| f64::from(x) * f64::from(x))
        .sum::<f64>()
        .sqrt();
    if norm == 0.0 || !norm.is_finite() {
        v.iter_mut().for_each(|x| *x = 0.0);
        if let Some(first) = v.first_mut() {
            *first = 1.0;
        }
        return;
    }
    for x in v.iter_mut() {
        *x = (f64::from(*x) / norm) as f32;
    }
}

/// Encodes and normalizes a batch, checking every vector's length.
pub fn embed_texts(embedder: &dyn Embedder, texts: &[&str]) -> Result<Vec<Vec<f32>>, EmbedError> {
    let mut out = embedder.encode_batch(texts)?;
    if out.len() != texts.len() {
        return Err(EmbedError::BatchSizeMismatch {
            expected: texts.len(),
            got: out.len(),
        });
    }
    let dim = embedder.dimension();
    for v in &mut out {
        if v.len() != dim {
            return Err(EmbedError::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        l2_normalize(v);
    }
    Ok(out)
}

/// Encodes a single query into a unit vector.
pub fn embed_query(embedder: &dyn Embedder, text: &str) -> Result<Vec<f32>, EmbedError> {
    Ok(embed_texts(embedder, &[text])?.remove(0))
}

/// Inner product accumulated in f64.
#[inline]
pub fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| f64::from(x) * f64::from(y))
        .sum()
}

/// Row-major `N x D` matrix of unit-norm document embeddings; row `i` is
/// posting `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseIndex {
    embedder_name: String,
    dimension: usize,
    vectors: Vec<f32>,
}

const BUILD_BATCH: usize = 256;

pub fn build_dense_index(
    docs: &[CompositeDocument],
    embedder: &dyn Embedder,
) -> Result<DenseIndex, EmbedError> {
    if docs.is_empty() {
        return Err(EmbedError::EmptyCorpus);
    }
    let dimension = embedder.dimension();
    let chunks: Vec<Vec<Vec<f32>>> = docs
        .par_chunks(BUILD_BATCH)
        .map(|chunk| {
            let texts: Vec<&str> = chunk.iter().map(|d| d.text.as_str()).collect();
            embed_texts(embedder, &texts)
        })
        .collect::<Result<_, _>>()?;
    let mut vectors = Vec::with_capacity(docs.len() * dimension);
    for v in chunks.into_iter().flatten() {
        vectors.extend_from_slice(&v);
    }
    Ok(DenseIndex {
        embedder_name: embedder.name().to_string(),
        dimension,
        vectors,
    })
}

/// Ranked `(posting, cosine)` pairs, highest first.
pub type SemanticCandidates = Vec<(PostingId, f64)>;

impl DenseIndex {
    pub fn from_parts(
        embedder_name: String,
        dimension: usize,
        vectors: Vec<f32>,
    ) -> Result<Self, String> {
        if dimension == 0 {
            return Err("dimension must be positive".into());
        }
        if !vectors.len().is_multiple_of(dimension) {
            return Err("vector data is not a whole number of rows".into());
        }
        for (i, row) in vectors.chunks_exact(dimension).enumerate() {
            let norm = dot(row, row).sqrt();
            if (norm - 1.0).abs() > 1e-5 {
                return Err(format!("row {i} is not unit-norm (norm {norm})"));
            }
        }
        Ok(Self {
            embedder_name,
            dimension,
            vectors,
        })
    }

    pub fn embedder_name(&self) -> &str {
        &self.embedder_name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len() / self.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn row(&self, id: PostingId) -> &[f32] {
        let i = id.index() * self.dimension;
        &self.vectors[i..i + self.dimension]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.vectors
    }

    /// Exact top-`n` by inner product, ties broken by ascending id. `n` is
    /// capped at the corpus size.
    pub fn semantic_candidates(
        &self,
        query: &[f32],
        n_candidates: usize,
    ) -> Result<SemanticCandidates, EmbedError> {
        if query.len() != self.dimension {
            return Err(EmbedError::DimensionMismatch {
                expected: self.dimension,
                got: query.len(),
            });
        }
        if n_candidates == 0 {
            return Err(EmbedError::ZeroCandidates);
        }
        let mut scored: Vec<(PostingId, f64)> = self
            .vectors
            .chunks_exact(self.dimension)
            .enumerate()
            .map(|(i, row)| (PostingId(i as u32), dot(query, row)))
            .collect();
        let n = n_candidates.min(scored.len());
        if n < scored.len() {
            scored.select_nth_unstable_by(n - 1, rank_order);
            scored.truncate(n);
        }
        scored.sort_unstable_by(rank_order);
        Ok(scored)
    }
}

/// Descending score, then ascending id.
pub(crate) fn rank_order(a: &(PostingId, f64), b: &(PostingId, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}
