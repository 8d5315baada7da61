//! Query-aware filtering with fallback to the unfiltered candidate set.

use crate::corpus::Corpus;
use crate::ingest::{CompositeDocument, JobPosting, PostingId};
use crate::query::{
    canonical_employment, canonical_seniority, mentions_work_mode, AppliedFilter, ParsedQuery,
};
use crate::text::contains_phrase;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterOutcome {
    pub kept: Vec<PostingId>,
    /// Empty when nothing was set or when the fallback kicked in.
    pub applied: Vec<AppliedFilter>,
    pub fallback_used: bool,
}

/// True when the posting satisfies every filter set on the query.
pub fn posting_matches(
    posting: &JobPosting,
    doc: &CompositeDocument,
    parsed: &ParsedQuery,
) -> bool {
    if let Some(mode) = parsed.work_mode {
        if !mentions_work_mode(&doc.text, mode) {
            return false;
        }
    }
    if let Some(level) = parsed.seniority_filter {
        if canonical_seniority(&posting.seniority) != Some(level) {
            return false;
        }
    }
    if let Some(kind) = parsed.employment_filter {
        if canonical_employment(&posting.employment_type) != Some(kind) {
            return false;
        }
    }
    if let Some(hint) = &parsed.location_hint {
        if !contains_phrase(&posting.location, hint) {
            return false;
        }
    }
    true
}

/// Keeps candidates passing every filter, preserving order. If none pass,
/// returns the input unchanged with `fallback_used` set.
pub fn apply_filters(
    candidates: &[PostingId],
    parsed: &ParsedQuery,
    corpus: &Corpus,
) -> FilterOutcome {
    if !parsed.has_filters() {
        return FilterOutcome {
            kept: candidates.to_vec(),
            applied: Vec::new(),
            fallback_used: false,
        };
    }
    let kept: Vec<PostingId> = candidates
        .iter()
        .copied()
        .filter(|&id| posting_matches(corpus.posting(id), corpus.document(id), parsed))
        .collect();
    if kept.is_empty() {
        FilterOutcome {
            kept: candidates.to_vec(),
            applied: Vec::new(),
            fallback_used: true,
        }
    } else {
        FilterOutcome {
            kept,
            applied: parsed.filters(),
            fallback_used: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{parse_query, SeniorityLevel};

    fn posting(id: u32, seniority: &str, location: &str) -> JobPosting {
        JobPosting {
            id: PostingId(id),
            title: "data analyst".into(),
            company: format!("c{id}"),
            location: location.into(),
            hiring_status: String::new(),
            posted_date: String::new(),
            seniority: seniority.into(),
            function: String::new(),
            employment_type: "full time".into(),
            industry: String::new(),
        }
    }

    fn corpus() -> Corpus {
        Corpus::new(vec![
            posting(0, "entry level", "london"),
            posting(1, "senior", "london remote"),
            posting(2, "entry level", "berlin"),
        ])
        .unwrap()
    }

    #[test]
    fn seniority_filter_keeps_matching() {
        let c = corpus();
        let mut q = parse_query("data analyst", c.gazetteer());
        q.seniority_filter = Some(SeniorityLevel::Entry);
        let ids = [PostingId(0), PostingId(1), PostingId(2)];
        let out = apply_filters(&ids, &q, &c);
        assert_eq!(out.kept, vec![PostingId(0), PostingId(2)]);
        assert!(!out.fallback_used);
        assert_eq!(out.applied.len(), 1);
    }

    #[test]
    fn unsatisfiable_filters_fall_back() {
        let c = corpus();
        let q = parse_query("remote junior analyst berlin", c.gazetteer());
        assert!(q.has_filters());
        let ids = [PostingId(0), PostingId(1), PostingId(2)];
        let out = apply_filters(&ids, &q, &c);
        assert_eq!(out.kept, ids.to_vec());
        assert!(out.fallback_used);
        assert!(out.applied.is_empty());
    }

    #[test]
    fn no_filters_is_identity() {
        let c = corpus();
        let q = parse_query("data analyst", c.gazetteer());
        let ids = [PostingId(2), PostingId(0)];
        let out = apply_filters(&ids, &q, &c);
        assert_eq!(out.kept, ids.to_vec());
        assert!(!out.fallback_used);
        assert!(out.applied.is_empty());
    }

    #[test]
    fn work_mode_and_location() {
        let c = corpus();
        let q = parse_query("remote analyst london", c.gazetteer());
        let ids = [PostingId(0), PostingId(1), PostingId(2)];
        let out = apply_filters(&ids, &q, &c);
        assert_eq!(out.kept, vec![PostingId(1)]);
        assert_eq!(out.applied.len(), 2);
    }
}
