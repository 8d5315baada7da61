//! Hybrid ranking pipeline.
//!
//! Order of operations for one query:
//!
//! 1. parse and normalize the query, extract filters
//! 2. embed the query, take the top `n_candidates` postings by cosine
//! 3. TF-IDF dot products for those candidates only
//! 4. min-max normalize both score lists over the candidate set, fuse
//! 5. apply filters (fall back to the unfiltered set if nothing survives)
//! 6. optionally re-score the top `rerank_pool` with a pair scorer and blend
//! 7. sort by final score (ties: ascending id), dedup, cap per company,
//!    truncate to `top_k`, attach explanations

mod diversity;
mod filters;
mod fusion;
mod rerank;

pub use diversity::{company_diversify, deduplicate};
pub use filters::{apply_filters, posting_matches, FilterOutcome};
pub use fusion::{fuse, metadata_bonus, min_max_normalize, rerank_blend};
pub use rerank::{HttpPairScorer, JaccardPairScorer, PairScorer, RerankError};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::embedding::{embed_query, DenseIndex, EmbedError, Embedder};
use crate::explain::{explain, ExplainContext, Explanation};
use crate::ingest::{JobPosting, PostingId};
use crate::lexical::{LexicalError, SparseIndex};
use crate::query::{parse_query, AppliedFilter, FilterOverrides, ParsedQuery};

#[derive(Debug, thiserror::Error)]
pub enum RankError {
    #[error("invalid ranker configuration: {0}")]
    InvalidConfig(String),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("cannot normalize an empty score list")]
    EmptyList,
    #[error("unknown posting {0}")]
    UnknownPosting(PostingId),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Lexical(#[from] LexicalError),
    #[error(transparent)]
    Rerank(#[from] RerankError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankerConfig {
    pub n_candidates: usize,
    pub w_sem: f64,
    pub w_lex: f64,
    pub epsilon: f64,
    pub rerank_enabled: bool,
    pub rerank_alpha: f64,
    pub rerank_pool: usize,
    pub metadata_bonus_per_field: f64,
    pub metadata_bonus_cap: f64,
    /// Evaluation only: serving has no seed posting to compare against.
    pub bonus_enabled: bool,
    pub company_cap: usize,
    pub top_k: usize,
}

impl Default for RankerConfig {
    fn default() -> Self {
        Self {
            n_candidates: 250,
            w_sem: 0.4,
            w_lex: 0.6,
            epsilon: 1e-9,
            rerank_enabled: false,
            rerank_alpha: 0.7,
            rerank_pool: 100,
            metadata_bonus_per_field: 0.05,
            metadata_bonus_cap: 0.10,
            bonus_enabled: false,
            company_cap: 2,
            top_k: 10,
        }
    }
}

impl RankerConfig {
    /// Same config with the given fusion weights.
    pub fn with_weights(&self, w_sem: f64, w_lex: f64) -> Self {
        Self {
            w_sem,
            w_lex,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), RankError> {
        let bad = |msg: &str| Err(RankError::InvalidConfig(msg.to_string()));
        if !(self.w_sem >= 0.0 && self.w_lex >= 0.0) {
            return bad("fusion weights must be non-negative");
        }
        if (self.w_sem + self.w_lex - 1.0).abs() > 1e-9 {
            return bad("w_sem + w_lex must equal 1");
        }
        if !(0.0..=1.0).contains(&self.rerank_alpha) {
            return bad("rerank_alpha must lie in [0, 1]");
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad("epsilon must be positive");
        }
        if self.n_candidates == 0
            || self.rerank_pool == 0
            || self.company_cap == 0
            || self.top_k == 0
        {
            return bad("counts and caps must be at least 1");
        }
        if self.metadata_bonus_per_field < 0.0 || self.metadata_bonus_cap < 0.0 {
            return bad("metadata bonus values must be non-negative");
        }
        Ok(())
    }
}

/// Every intermediate score behind a result.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub s_sem_raw: f64,
    pub s_lex_raw: f64,
    pub s_sem_hat: f64,
    pub s_lex_hat: f64,
    pub s_hybrid: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_rerank_raw: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_rerank_hat: Option<f64>,
    pub bonus: f64,
    pub s_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub posting_id: PostingId,
    pub posting: JobPosting,
    /// 1-based.
    pub rank: usize,
    pub breakdown: ScoreBreakdown,
    pub explanation: Option<Explanation>,
}

/// Per-call knobs that are not part of the ranking configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommendOptions {
    /// Seed posting for the metadata bonus and seed-based evidence.
    pub seed: Option<PostingId>,
    /// Posting to drop from the results (the seed, in evaluation).
    pub exclude: Option<PostingId>,
    pub overrides: FilterOverrides,
    pub explain: bool,
}

impl Default for RecommendOptions {
    fn default() -> Self {
        Self {
            seed: None,
            exclude: None,
            overrides: FilterOverrides::default(),
            explain: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecommendOutput {
    pub parsed: ParsedQuery,
    pub applied_filters: Vec<AppliedFilter>,
    pub fallback_used: bool,
    pub results: Vec<Recommendation>,
}

/// Fails unless both indexes cover the corpus and were built with `embedder`.
pub fn check_indexes(
    corpus: &Corpus,
    sparse: &SparseIndex,
    dense: &DenseIndex,
    embedder: &dyn Embedder,
) -> Result<(), RankError> {
    if sparse.num_documents() != corpus.len() || dense.len() != corpus.len() {
        return Err(RankError::IndexMismatch(format!(
            "corpus has {} postings, sparse index {}, dense index {}",
            corpus.len(),
            sparse.num_documents(),
            dense.len()
        )));
    }
    if dense.embedder_name() != embedder.name() || dense.dimension() != embedder.dimension() {
        return Err(RankError::IndexMismatch(format!(
            "dense index built with `{}` (d={}), query embedder is `{}` (d={})",
            dense.embedder_name(),
            dense.dimension(),
            embedder.name(),
            embedder.dimension()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct Scored {
    id: PostingId,
    breakdown: ScoreBreakdown,
}

fn by_score(a: f64, a_id: PostingId, b: f64, b_id: PostingId) -> Ordering {
    b.total_cmp(&a).then(a_id.cmp(&b_id))
}

/// Candidate retrieval, lexical scoring, normalization and fusion over the
/// semantic candidate set, before filtering. `s_final` is `s_hybrid + bonus`.
fn hybrid_candidates(
    parsed: &ParsedQuery,
    corpus: &Corpus,
    sparse: &SparseIndex,
    dense: &DenseIndex,
    embedder: &dyn Embedder,
    cfg: &RankerConfig,
    seed: Option<&JobPosting>,
) -> Result<Vec<Scored>, RankError> {
    let query_vec = embed_query(embedder, &parsed.normalized)?;
    let semantic = dense.semantic_candidates(&query_vec, cfg.n_candidates)?;
    let ids: Vec<PostingId> = semantic.iter().map(|&(id, _)| id).collect();
    let sem_raw: Vec<f64> = semantic.iter().map(|&(_, s)| s).collect();
    let lex_raw = sparse.lexical_scores(&sparse.query_vector(&parsed.tokens), &ids)?;
    let sem_hat = min_max_normalize(&sem_raw, cfg.epsilon)?;
    let lex_hat = min_max_normalize(&lex_raw, cfg.epsilon)?;

    Ok(ids
        .iter()
        .enumerate()
        .map(|(i, &id)| {
            let s_hybrid = fuse(sem_hat[i], lex_hat[i], cfg);
            let bonus = seed.map_or(0.0, |s| metadata_bonus(s, corpus.posting(id), cfg));
            Scored {
                id,
                breakdown: ScoreBreakdown {
                    s_sem_raw: sem_raw[i],
                    s_lex_raw: lex_raw[i],
                    s_sem_hat: sem_hat[i],
                    s_lex_hat: lex_hat[i],
                    s_hybrid,
                    s_rerank_raw: None,
                    s_rerank_hat: None,
                    bonus,
                    s_final: s_hybrid + bonus,
                },
            }
        })
        .collect())
}

/// Re-scores the top `rerank_pool` candidates (by `s_hybrid`) and blends.
/// `list` must be sorted by `s_final`; it is re-sorted on return.
fn rerank_pool(
    list: &mut [Scored],
    parsed: &ParsedQuery,
    corpus: &Corpus,
    scorer: &dyn PairScorer,
    cfg: &RankerConfig,
) -> Result<(), RankError> {
    let mut order: Vec<usize> = (0..list.len()).collect();
    order.sort_by(|&a, &b| {
        by_score(
            list[a].breakdown.s_hybrid,
            list[a].id,
            list[b].breakdown.s_hybrid,
            list[b].id,
        )
    });
    order.truncate(cfg.rerank_pool);
    if order.is_empty() {
        return Ok(());
    }
    let texts: Vec<&str> = order
        .iter()
        .map(|&i| corpus.document(list[i].id).text.as_str())
        .collect();
    let raw = scorer.score_batch(&parsed.normalized, &texts)?;
    if raw.len() != texts.len() {
        return Err(RerankError::CountMismatch {
            expected: texts.len(),
            got: raw.len(),
        }
        .into());
    }
    let hat = min_max_normalize(&raw, cfg.epsilon)?;
    for (k, &i) in order.iter().enumerate() {
        let b = &mut list[i].breakdown;
        b.s_rerank_raw = Some(raw[k]);
        b.s_rerank_hat = Some(hat[k]);
        b.s_final = rerank_blend(hat[k], b.s_hybrid, b.bonus, cfg.rerank_alpha);
    }
    list.sort_by(|a, b| by_score(a.breakdown.s_final, a.id, b.breakdown.s_final, b.id));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn recommend(
    query_text: &str,
    corpus: &Corpus,
    sparse: &SparseIndex,
    dense: &DenseIndex,
    embedder: &dyn Embedder,
    pair_scorer: Option<&dyn PairScorer>,
    cfg: &RankerConfig,
    opts: &RecommendOptions,
) -> Result<RecommendOutput, RankError> {
    cfg.validate()?;
    check_indexes(corpus, sparse, dense, embedder)?;
    let seed = match opts.seed {
        Some(id) => Some(corpus.get(id).ok_or(RankError::UnknownPosting(id))?),
        None => None,
    };

    let mut parsed = parse_query(query_text, corpus.gazetteer());
    parsed.apply_overrides(&opts.overrides);

    let scored = hybrid_candidates(&parsed, corpus, sparse, dense, embedder, cfg, seed)?;
    let ids: Vec<PostingId> = scored.iter().map(|s| s.id).collect();
    let outcome = apply_filters(&ids, &parsed, corpus);

    // Candidates are unique, so membership by id is enough.
    let keep: std::collections::HashSet<PostingId> = outcome.kept.iter().copied().collect();
    let mut list: Vec<Scored> = scored
        .into_iter()
        .filter(|s| keep.contains(&s.id) && Some(s.id) != opts.exclude)
        .collect();
    list.sort_by(|a, b| by_score(a.breakdown.s_final, a.id, b.breakdown.s_final, b.id));

    let rank_before: Option<std::collections::HashMap<PostingId, usize>> = match pair_scorer {
        Some(scorer) if cfg.rerank_enabled => {
            let before = list.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
            rerank_pool(&mut list, &parsed, corpus, scorer, cfg)?;
            Some(before)
        }
        _ => None,
    };
    let moved: Vec<bool> = list
        .iter()
        .enumerate()
        .map(|(i, s)| rank_before.as_ref().is_some_and(|m| m[&s.id] != i))
        .collect();

    let with_flags: Vec<(Scored, bool, &JobPosting)> = list
        .into_iter()
        .zip(moved)
        .map(|(s, m)| {
            let p = corpus.posting(s.id);
            (s, m, p)
        })
        .collect();
    let deduped = deduplicate(with_flags, |item| item.2);
    let mut capped = company_diversify(deduped, cfg.company_cap, |item| item.2);
    capped.truncate(cfg.top_k);

    let ctx = ExplainContext {
        parsed: &parsed,
        applied_filters: &outcome.applied,
        fallback_used: outcome.fallback_used,
        config: cfg,
        seed,
    };
    let results = capped
        .into_iter()
        .enumerate()
        .map(|(i, (s, moved, posting))| {
            let explanation = opts
                .explain
                .then(|| explain(&ctx, posting, corpus.document(s.id), &s.breakdown, moved));
            Recommendation {
                posting_id: s.id,
                posting: posting.clone(),
                rank: i + 1,
                breakdown: s.breakdown,
                explanation,
            }
        })
        .collect();

    Ok(RecommendOutput {
        applied_filters: outcome.applied.clone(),
        fallback_used: outcome.fallback_used,
        parsed,
        results,
    })
}
