//! Metadata-based explanations: keyword overlap, applied filters, metadata
//! evidence and which signal carried the result. Explanations only observe
//! scores; they never change them.

use serde::{Deserialize, Serialize};

use crate::ingest::{CompositeDocument, JobPosting};
use crate::query::{canonical_employment, canonical_seniority, AppliedFilter, ParsedQuery};
use crate::ranker::{RankerConfig, ScoreBreakdown};
use crate::text::tokenize;

/// Gap between weighted contributions needed to call one signal dominant.
pub const DOMINANCE_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetadataField {
    Function,
    Industry,
    Seniority,
    EmploymentType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataEvidence {
    pub field: MetadataField,
    pub value: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingEvidence {
    Lexical,
    Semantic,
    Balanced,
    Reranked,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub matched_keywords: Vec<String>,
    pub applied_filters: Vec<AppliedFilter>,
    pub fallback_used: bool,
    pub metadata_evidence: Vec<MetadataEvidence>,
    pub ranking_evidence: RankingEvidence,
}

/// Inputs shared by every result of one `recommend` call.
pub struct ExplainContext<'a> {
    pub parsed: &'a ParsedQuery,
    pub applied_filters: &'a [AppliedFilter],
    pub fallback_used: bool,
    pub config: &'a RankerConfig,
    /// Seed posting in evaluation mode.
    pub seed: Option<&'a JobPosting>,
}

pub fn explain(
    ctx: &ExplainContext<'_>,
    posting: &JobPosting,
    composite: &CompositeDocument,
    breakdown: &ScoreBreakdown,
    moved_by_rerank: bool,
) -> Explanation {
    let doc_tokens: std::collections::HashSet<&str> =
        tokenize(&composite.text).into_iter().collect();
    let mut matched_keywords: Vec<String> = Vec::new();
    for tok in &ctx.parsed.tokens {
        if doc_tokens.contains(tok.as_str()) && !matched_keywords.contains(tok) {
            matched_keywords.push(tok.clone());
        }
    }

    Explanation {
        matched_keywords,
        applied_filters: if ctx.fallback_used {
            Vec::new()
        } else {
            ctx.applied_filters.to_vec()
        },
        fallback_used: ctx.fallback_used,
        metadata_evidence: metadata_evidence(ctx, posting),
        ranking_evidence: ranking_evidence(breakdown, ctx.config, moved_by_rerank),
    }
}

fn metadata_evidence(ctx: &ExplainContext<'_>, posting: &JobPosting) -> Vec<MetadataEvidence> {
    let mut out: Vec<MetadataEvidence> = Vec::new();
    let mut push = |field: MetadataField, value: &str| {
        if !value.is_empty() && !out.iter().any(|e| e.field == field) {
            out.push(MetadataEvidence {
                field,
                value: value.to_string(),
            });
        }
    };

    if let Some(level) = ctx.parsed.seniority_filter {
        if canonical_seniority(&posting.seniority) == Some(level) {
            push(MetadataField::Seniority, &posting.seniority);
        }
    }
    if let Some(kind) = ctx.parsed.employment_filter {
        if canonical_employment(&posting.employment_type) == Some(kind) {
            push(MetadataField::EmploymentType, &posting.employment_type);
        }
    }
    if let Some(seed) = ctx.seed {
        let pairs = [
            (MetadataField::Function, &seed.function, &posting.function),
            (MetadataField::Industry, &seed.industry, &posting.industry),
            (
                MetadataField::Seniority,
                &seed.seniority,
                &posting.seniority,
            ),
            (
                MetadataField::EmploymentType,
                &seed.employment_type,
                &posting.employment_type,
            ),
        ];
        for (field, a, b) in pairs {
            if !a.is_empty() && a == b {
                push(field, b);
            }
        }
    }
    out
}

fn ranking_evidence(
    b: &ScoreBreakdown,
    cfg: &RankerConfig,
    moved_by_rerank: bool,
) -> RankingEvidence {
    if moved_by_rerank {
        return RankingEvidence::Reranked;
    }
    let lexical = cfg.w_lex * b.s_lex_hat;
    let semantic = cfg.w_sem * b.s_sem_hat;
    if lexical > semantic + DOMINANCE_MARGIN {
        RankingEvidence::Lexical
    } else if semantic > lexical + DOMINANCE_MARGIN {
        RankingEvidence::Semantic
    } else {
        RankingEvidence::Balanced
    }
}
