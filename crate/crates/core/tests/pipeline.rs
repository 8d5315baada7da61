//! End-to-end ranking invariants on the synthetic corpus.

mod common;

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use common::*;
use mjobs_core::query::{FilterOverrides, SeniorityLevel, WorkMode};
use mjobs_core::ranker::{posting_matches, JaccardPairScorer};
use mjobs_core::{Engine, RankerConfig, RecommendOptions, RecommendOutput};
use proptest::prelude::*;

fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(|| synthetic_engine(500, 42))
}

fn check_invariants(engine: &Engine, out: &RecommendOutput, cfg: &RankerConfig) {
    assert!(out.results.len() <= cfg.top_k);
    for (i, r) in out.results.iter().enumerate() {
        assert_eq!(r.rank, i + 1);
        let b = &r.breakdown;
        assert!((0.0..1.0).contains(&b.s_sem_hat), "{b:?}");
        assert!((0.0..1.0).contains(&b.s_lex_hat), "{b:?}");
    }
    for w in out.results.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert!(
            a.breakdown.s_final > b.breakdown.s_final
                || (a.breakdown.s_final == b.breakdown.s_final && a.posting_id < b.posting_id)
        );
    }
    let mut keys = HashSet::new();
    let mut per_company: HashMap<&str, usize> = HashMap::new();
    for r in &out.results {
        let p = &r.posting;
        assert!(
            keys.insert((&p.title, &p.company, &p.location)),
            "duplicate {p:?}"
        );
        if !p.company.is_empty() {
            *per_company.entry(&p.company).or_default() += 1;
        }
    }
    assert!(per_company.values().all(|&n| n <= cfg.company_cap));
    if !out.fallback_used && out.parsed.has_filters() {
        let corpus = engine.corpus();
        for r in &out.results {
            assert!(posting_matches(
                &r.posting,
                corpus.document(r.posting_id),
                &out.parsed
            ));
        }
    }
    if out.fallback_used {
        assert!(out.applied_filters.is_empty());
        assert!(!out.results.is_empty());
    }
}

const QUERY_WORDS: &[&str] = &[
    "software",
    "engineer",
    "developer",
    "remote",
    "junior",
    "senior",
    "london",
    "berlin",
    "contract",
    "part-time",
    "internship",
    "data",
    "analyst",
    "sales",
    "manager",
    "nurse",
    "hybrid",
    "on-site",
    "qa",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ranking_invariants(
        words in prop::collection::vec(prop::sample::select(QUERY_WORDS), 1..5),
        n_candidates in 5usize..300,
        w_sem in 0.0f64..=1.0,
        cap in 1usize..4,
        top_k in 1usize..25,
    ) {
        let cfg = RankerConfig {
            n_candidates,
            company_cap: cap,
            top_k,
            ..RankerConfig::default().with_weights(w_sem, 1.0 - w_sem)
        };
        let out = engine().recommend(&words.join(" "), None, &cfg, &RecommendOptions::default()).unwrap();
        check_invariants(engine(), &out, &cfg);
    }

    #[test]
    fn reranking_keeps_invariants(
        words in prop::collection::vec(prop::sample::select(QUERY_WORDS), 1..4),
        pool in 1usize..150,
    ) {
        let cfg = RankerConfig { rerank_enabled: true, rerank_pool: pool, ..RankerConfig::default() };
        let out = engine()
            .recommend(&words.join(" "), Some(&JaccardPairScorer), &cfg, &RecommendOptions::default())
            .unwrap();
        check_invariants(engine(), &out, &cfg);
        for r in &out.results {
            if let Some(hat) = r.breakdown.s_rerank_hat {
                let want = cfg.rerank_alpha * hat + (1.0 - cfg.rerank_alpha) * r.breakdown.s_hybrid + r.breakdown.bonus;
                prop_assert!((r.breakdown.s_final - want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn explanations_do_not_change_scores() {
    let cfg = RankerConfig::default();
    for q in [
        "remote junior data analyst london",
        "python coder",
        "sales manager contract",
    ] {
        let with = engine()
            .recommend(q, None, &cfg, &RecommendOptions::default())
            .unwrap();
        let without = engine()
            .recommend(
                q,
                None,
                &cfg,
                &RecommendOptions {
                    explain: false,
                    ..RecommendOptions::default()
                },
            )
            .unwrap();
        assert_eq!(with.results.len(), without.results.len());
        for (a, b) in with.results.iter().zip(&without.results) {
            assert_eq!(a.posting_id, b.posting_id);
            assert_eq!(a.breakdown, b.breakdown);
            assert!(a.explanation.is_some() && b.explanation.is_none());
        }
    }
}

#[test]
fn remote_junior_query_is_filtered() {
    let out = engine()
        .recommend(
            "remote junior data analyst london",
            None,
            &RankerConfig::default(),
            &RecommendOptions::default(),
        )
        .unwrap();
    assert_eq!(out.parsed.work_mode, Some(WorkMode::Remote));
    assert_eq!(out.parsed.seniority_filter, Some(SeniorityLevel::Entry));
    assert_eq!(out.parsed.location_hint.as_deref(), Some("london"));
    if !out.fallback_used {
        for r in &out.results {
            assert!(r.posting.location.contains("london") && r.posting.location.contains("remote"));
            assert_eq!(r.posting.seniority, "entry level");
        }
    }
    check_invariants(engine(), &out, &RankerConfig::default());
}

#[test]
fn unmatched_filter_falls_back() {
    let opts = RecommendOptions {
        overrides: FilterOverrides {
            location: Some(Some("atlantis".into())),
            ..FilterOverrides::default()
        },
        ..RecommendOptions::default()
    };
    let out = engine()
        .recommend("data analyst", None, &RankerConfig::default(), &opts)
        .unwrap();
    assert!(out.fallback_used);
    assert!(out.applied_filters.is_empty());
    assert_eq!(out.results.len(), 10);
    let plain = engine()
        .recommend(
            "data analyst",
            None,
            &RankerConfig::default(),
            &RecommendOptions::default(),
        )
        .unwrap();
    let ids = |o: &RecommendOutput| o.results.iter().map(|r| r.posting_id).collect::<Vec<_>>();
    assert_eq!(ids(&out), ids(&plain));
}

#[test]
fn overrides_switch_filters_off() {
    let opts = RecommendOptions {
        overrides: FilterOverrides {
            work_mode: Some(None),
            seniority: Some(None),
            location: Some(None),
            ..FilterOverrides::default()
        },
        ..RecommendOptions::default()
    };
    let out = engine()
        .recommend(
            "remote junior data analyst london",
            None,
            &RankerConfig::default(),
            &opts,
        )
        .unwrap();
    assert!(!out.parsed.has_filters());
    assert!(out.applied_filters.is_empty());
}

#[test]
fn single_weight_degeneracy() {
    let base = RankerConfig {
        company_cap: 1000,
        ..RankerConfig::default()
    };
    for q in ["software developer", "nurse london", "coder"] {
        for (w_sem, pick) in [(1.0, 0usize), (0.0, 1usize)] {
            let cfg = base.with_weights(w_sem, 1.0 - w_sem);
            let out = engine()
                .recommend(q, None, &cfg, &RecommendOptions::default())
                .unwrap();
            for r in &out.results {
                let hat = if pick == 0 {
                    r.breakdown.s_sem_hat
                } else {
                    r.breakdown.s_lex_hat
                };
                assert_eq!(r.breakdown.s_hybrid, hat);
            }
        }
    }
}

#[test]
fn seed_is_excluded_and_bonus_applies() {
    let corpus = engine().corpus();
    let seed = corpus.postings()[7].clone();
    let cfg = RankerConfig {
        bonus_enabled: true,
        ..RankerConfig::default()
    };
    let opts = RecommendOptions {
        seed: Some(seed.id),
        exclude: Some(seed.id),
        ..RecommendOptions::default()
    };
    let out = engine().recommend(&seed.title, None, &cfg, &opts).unwrap();
    assert!(out.results.iter().all(|r| r.posting_id != seed.id));
    for r in &out.results {
        let mut want = 0.0;
        if r.posting.function == seed.function {
            want += 0.05;
        }
        if r.posting.industry == seed.industry {
            want += 0.05;
        }
        assert!((r.breakdown.bonus - f64::min(want, 0.10)).abs() < 1e-12);
    }
}
