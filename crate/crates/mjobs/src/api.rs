//! Request and response types shared by the HTTP service and the CLI.
//!
//! Both surfaces turn their input into a [`RecommendRequest`] and go through
//! [`recommend`], so identical inputs rank identically.

use std::time::Instant;

use mjobs_core::query::{EmploymentType, FilterOverrides, ParsedQuery, SeniorityLevel, WorkMode};
use mjobs_core::ranker::{PairScorer, RankerConfig, RecommendOptions};
use mjobs_core::{Engine, Recommendation};
use serde::{Deserialize, Serialize};

pub const MAX_TOP_K: usize = 100;

/// Filter override value that switches a filter off.
pub const FILTER_OFF: &str = "none";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecommendRequest {
    pub query: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rerank: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_sem: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_lex: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub work_mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seniority: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub employment: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendResponse {
    pub parsed_query: ParsedQuery,
    pub applied_filters: Vec<mjobs_core::query::AppliedFilter>,
    pub fallback_used: bool,
    pub results: Vec<Recommendation>,
    pub timing_ms: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    NotFound(String),
    #[error("artifacts are still loading")]
    Unavailable,
    #[error("{0}")]
    Internal(String),
}

fn override_value<T>(
    raw: &Option<String>,
    field: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Option<Option<T>>, ApiError> {
    match raw.as_deref().map(str::trim) {
        None => Ok(None),
        Some(v) if v.eq_ignore_ascii_case(FILTER_OFF) => Ok(Some(None)),
        Some(v) => parse(&v.to_ascii_lowercase())
            .map(|x| Some(Some(x)))
            .ok_or_else(|| ApiError::BadRequest(format!("invalid {field} `{v}`"))),
    }
}

/// Validates a request and derives the ranker configuration and options.
pub fn resolve(
    req: &RecommendRequest,
    defaults: &RankerConfig,
) -> Result<(RankerConfig, RecommendOptions), ApiError> {
    if req.query.trim().is_empty() {
        return Err(ApiError::BadRequest("query must not be empty".into()));
    }
    let mut cfg = defaults.clone();
    if let Some(k) = req.top_k {
        if !(1..=MAX_TOP_K).contains(&k) {
            return Err(ApiError::BadRequest(format!(
                "top_k must lie in [1, {MAX_TOP_K}]"
            )));
        }
        cfg.top_k = k;
    }
    if let Some(r) = req.rerank {
        cfg.rerank_enabled = r;
    }
    let (w_sem, w_lex) = match (req.w_sem, req.w_lex) {
        (None, None) => (cfg.w_sem, cfg.w_lex),
        (Some(s), None) => (s, 1.0 - s),
        (None, Some(l)) => (1.0 - l, l),
        (Some(s), Some(l)) => (s, l),
    };
    if !(0.0..=1.0).contains(&w_sem)
        || !(0.0..=1.0).contains(&w_lex)
        || (w_sem + w_lex - 1.0).abs() > 1e-9
    {
        return Err(ApiError::BadRequest(
            "w_sem and w_lex must lie in [0, 1] and sum to 1".into(),
        ));
    }
    cfg = cfg.with_weights(w_sem, w_lex);
    cfg.validate()
        .map_err(|e| ApiError::BadRequest(e.to_string()))?;

    let location = match req.location.as_deref().map(str::trim) {
        None => None,
        Some(v) if v.eq_ignore_ascii_case(FILTER_OFF) || v.is_empty() => Some(None),
        Some(v) => Some(Some(v.to_string())),
    };
    let overrides = FilterOverrides {
        work_mode: override_value(&req.work_mode, "work_mode", WorkMode::parse)?,
        seniority: override_value(&req.seniority, "seniority", SeniorityLevel::parse)?,
        employment: override_value(&req.employment, "employment", EmploymentType::parse)?,
        location,
    };
    Ok((
        cfg,
        RecommendOptions {
            overrides,
            ..RecommendOptions::default()
        },
    ))
}

pub fn recommend(
    engine: &Engine,
    scorer: &dyn PairScorer,
    defaults: &RankerConfig,
    req: &RecommendRequest,
) -> Result<RecommendResponse, ApiError> {
    let start = Instant::now();
    let (cfg, opts) = resolve(req, defaults)?;
    let out = engine
        .recommend(&req.query, Some(scorer), &cfg, &opts)
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(RecommendResponse {
        parsed_query: out.parsed,
        applied_filters: out.applied_filters,
        fallback_used: out.fallback_used,
        results: out.results,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
