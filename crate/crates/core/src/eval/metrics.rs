//! Graded relevance and ranking metrics.

use serde::{Deserialize, Serialize};

use crate::ingest::JobPosting;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("k must be at least 1")]
pub struct InvalidK;

/// Metadata-consistency grade of a candidate against a seed posting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RelevanceGrade(u8);

impl RelevanceGrade {
    pub const NONE: Self = Self(0);
    pub const WEAK: Self = Self(1);
    pub const RELEVANT: Self = Self(2);
    pub const HIGH: Self = Self(3);

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn from_value(v: u8) -> Option<Self> {
        (v <= 3).then_some(Self(v))
    }
}

/// First matching rule wins:
/// 3 same title; 2 same function or industry; 1 same seniority or
/// employment type; 0 otherwise. Empty fields never match.
pub fn grade_relevance(seed: &JobPosting, candidate: &JobPosting) -> RelevanceGrade {
    let same = |a: &str, b: &str| !a.is_empty() && a == b;
    if same(&seed.title, &candidate.title) {
        RelevanceGrade::HIGH
    } else if same(&seed.function, &candidate.function) || same(&seed.industry, &candidate.industry)
    {
        RelevanceGrade::RELEVANT
    } else if same(&seed.seniority, &candidate.seniority)
        || same(&seed.employment_type, &candidate.employment_type)
    {
        RelevanceGrade::WEAK
    } else {
        RelevanceGrade::NONE
    }
}

/// Share of the top `k` with grade >= 2. Missing ranks count as 0; the
/// denominator is always `k`.
pub fn precision_at_k(grades: &[u8], k: usize) -> Result<f64, InvalidK> {
    if k == 0 {
        return Err(InvalidK);
    }
    let hits = grades.iter().take(k).filter(|&&g| g >= 2).count();
    Ok(hits as f64 / k as f64)
}

/// Sum of `(2^rel - 1) / log2(rank + 1)` over the first `k` grades.
pub fn dcg_at_k(grades: &[u8], k: usize) -> f64 {
    grades
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, &g)| (2f64.powi(i32::from(g)) - 1.0) / ((i + 2) as f64).log2())
        .sum()
}

/// DCG normalized by the DCG of the same top-`k` grades sorted
/// descending. Zero when every grade is zero.
pub fn ndcg_at_k(grades: &[u8], k: usize) -> Result<f64, InvalidK> {
    if k == 0 {
        return Err(InvalidK);
    }
    let mut ideal: Vec<u8> = grades.iter().take(k).copied().collect();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg_at_k(&ideal, k);
    if idcg == 0.0 {
        return Ok(0.0);
    }
    Ok(dcg_at_k(grades, k) / idcg)
}
