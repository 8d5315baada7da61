//! Score normalization, fusion and re-rank blending.

use super::{RankError, RankerConfig};
use crate::ingest::JobPosting;

/// `(s - min) / (max - min + eps)` over the given list. Outputs lie in
/// `[0, 1)`; a constant list maps to all zeros.
pub fn min_max_normalize(scores: &[f64], epsilon: f64) -> Result<Vec<f64>, RankError> {
    let (min, max) = scores
        .iter()
        .fold(None, |acc: Option<(f64, f64)>, &s| match acc {
            None => Some((s, s)),
            Some((lo, hi)) => Some((lo.min(s), hi.max(s))),
        })
        .ok_or(RankError::EmptyList)?;
    let denom = max - min + epsilon;
    Ok(scores.iter().map(|&s| (s - min) / denom).collect())
}

/// Weighted sum of the normalized semantic and lexical scores.
#[inline]
pub fn fuse(sem_hat: f64, lex_hat: f64, cfg: &RankerConfig) -> f64 {
    cfg.w_sem * sem_hat + cfg.w_lex * lex_hat
}

/// `alpha * rerank_hat + (1 - alpha) * s_hybrid + bonus`.
#[inline]
pub fn rerank_blend(rerank_hat: f64, s_hybrid: f64, bonus: f64, alpha: f64) -> f64 {
    alpha * rerank_hat + (1.0 - alpha) * s_hybrid + bonus
}

/// Additive boost for candidates sharing job function and/or industry with
/// the seed posting. Zero unless `bonus_enabled`.
pub fn metadata_bonus(seed: &JobPosting, candidate: &JobPosting, cfg: &RankerConfig) -> f64 {
    if !cfg.bonus_enabled {
        return 0.0;
    }
    let same = |a: &str, b: &str| !a.is_empty() && a == b;
    let fields = [
        same(&seed.function, &candidate.function),
        same(&seed.industry, &candidate.industry),
    ];
    let count = fields.iter().filter(|&&m| m).count() as f64;
    (count * cfg.metadata_bonus_per_field).min(cfg.metadata_bonus_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::PostingId;

    #[test]
    fn min_max_worked_example() {
        let out = min_max_normalize(&[0.2, 0.5, 0.8], 1e-9).unwrap();
        assert_eq!(out[0], 0.0);
        assert!((out[1] - 0.4999999992).abs() < 1e-10);
        assert!((out[2] - 0.9999999983).abs() < 1e-10);
        assert!(out.iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn min_max_degenerate() {
        assert_eq!(
            min_max_normalize(&[0.4, 0.4, 0.4], 1e-9).unwrap(),
            vec![0.0; 3]
        );
        assert_eq!(min_max_normalize(&[7.0], 1e-9).unwrap(), vec![0.0]);
        assert!(matches!(
            min_max_normalize(&[], 1e-9),
            Err(RankError::EmptyList)
        ));
    }

    #[test]
    fn fusion_arithmetic() {
        let cfg = RankerConfig::default();
        assert!((fuse(1.0, 0.5, &cfg) - 0.70).abs() < 1e-12);
        assert_eq!(fuse(0.0, 0.0, &cfg), 0.0);
        assert!((fuse(1.0, 1.0, &cfg) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn blend_arithmetic() {
        assert!((rerank_blend(0.9, 0.7, 0.0, 0.7) - 0.84).abs() < 1e-12);
        assert_eq!(rerank_blend(0.9, 0.7, 0.05, 0.0), 0.7 + 0.05);
        assert_eq!(rerank_blend(0.9, 0.7, 0.0, 1.0), 0.9);
    }

    fn posting(function: &str, industry: &str) -> JobPosting {
        JobPosting {
            id: PostingId(0),
            title: "t".into(),
            company: String::new(),
            location: String::new(),
            hiring_status: String::new(),
            posted_date: String::new(),
            seniority: String::new(),
            function: function.into(),
            employment_type: String::new(),
            industry: industry.into(),
        }
    }

    #[test]
    fn bonus_table() {
        let cfg = RankerConfig {
            bonus_enabled: true,
            ..RankerConfig::default()
        };
        let seed = posting("analytics", "finance");
        assert_eq!(
            metadata_bonus(&seed, &posting("analytics", "retail"), &cfg),
            0.05
        );
        assert_eq!(
            metadata_bonus(&seed, &posting("analytics", "finance"), &cfg),
            0.10
        );
        assert_eq!(
            metadata_bonus(&seed, &posting("sales", "retail"), &cfg),
            0.0
        );
        assert_eq!(
            metadata_bonus(&posting("", ""), &posting("", ""), &cfg),
            0.0
        );
        let capped = RankerConfig {
            metadata_bonus_cap: 0.07,
            ..cfg.clone()
        };
        assert_eq!(
            metadata_bonus(&seed, &posting("analytics", "finance"), &capped),
            0.07
        );
        let off = RankerConfig::default();
        assert_eq!(
            metadata_bonus(&seed, &posting("analytics", "finance"), &off),
            0.0
        );
    }
}
