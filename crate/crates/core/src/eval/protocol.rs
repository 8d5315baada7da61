use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{grade_relevance, ndcg_at_k, precision_at_k};
use crate::engine::Engine;
use crate::ingest::PostingId;
use crate::ranker::{PairScorer, RankerConfig, RecommendOptions};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub n_seeds: usize,
    pub rng_seed: u64,
    pub k: usize,
    pub ranker: RankerConfig,
    pub exclude_seed_itself: bool,
}

impl EvalConfig {
    pub fn new(rng_seed: u64) -> Self {
        Self {
            n_seeds: 500,
            rng_seed,
            k: 10,
            ranker: RankerConfig::default(),
            exclude_seed_itself: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed_id: PostingId,
    pub query: String,
    pub result_ids: Vec<PostingId>,
    pub grades: Vec<u8>,
    pub precision_at_k: f64,
    pub ndcg_at_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub k: usize,
    pub n_seeds: usize,
    pub mean_precision_at_k: f64,
    pub std_precision_at_k: f64,
    pub mean_ndcg_at_k: f64,
    pub std_ndcg_at_k: f64,
    pub records: Vec<SeedRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub candidates: usize,
    pub w_sem: f64,
    pub w_lex: f64,
    pub p_at_10: f64,
    pub ndcg_at_10: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RerankComparison {
    pub baseline: EvalReport,
    pub reranked: EvalReport,
    pub delta_p: f64,
    pub delta_ndcg: f64,
}

/// Uniform sample without replacement, fully determined by `rng_seed`.
pub fn sample_seeds(
    corpus_size: usize,
    n_seeds: usize,
    rng_seed: u64,
) -> Result<Vec<PostingId>, Error> {
    if n_seeds > corpus_size {
        return Err(Error::EvalConfig(format!(
            "n_seeds ({n_seeds}) exceeds corpus size ({corpus_size})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(sample(&mut rng, corpus_size, n_seeds)
        .into_iter()
        .map(|i| PostingId(i as u32))
        .collect())
}

fn evaluate_seeds(
    engine: &Engine,
    pair_scorer: Option<&dyn PairScorer>,
    cfg: &EvalConfig,
    ranker: &RankerConfig,
    seeds: &[PostingId],
) -> Result<EvalReport, Error> {
    if cfg.k == 0 {
        return Err(Error::EvalConfig("k must be at least 1".into()));
    }
    let ranker = RankerConfig {
        top_k: cfg.k,
        ..ranker.clone()
    };
    ranker.validate()?;
    let corpus = engine.corpus();
    let records = seeds
        .par_iter()
        .map(|&seed_id| {
            let seed = corpus.posting(seed_id);
            let opts = RecommendOptions {
                seed: Some(seed_id),
                exclude: cfg.exclude_seed_itself.then_some(seed_id),
                explain: false,
                ..RecommendOptions::default()
            };
            let out = engine.recommend(&seed.title, pair_scorer, &ranker, &opts)?;
            let result_ids: Vec<PostingId> = out.results.iter().map(|r| r.posting_id).collect();
            let grades: Vec<u8> = out
                .results
                .iter()
                .map(|r| grade_relevance(seed, &r.posting).value())
                .collect();
            Ok(SeedRecord {
                seed_id,
                query: seed.title.clone(),
                precision_at_k: precision_at_k(&grades, cfg.k).expect("k checked above"),
                ndcg_at_k: ndcg_at_k(&grades, cfg.k).expect("k checked above"),
                result_ids,
                grades,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(aggregate(cfg.k, records))
}

/// Mean and population standard deviation over the records. Values are
/// summed in seed-id order so the result does not depend on record order.
pub fn aggregate(k: usize, records: Vec<SeedRecord>) -> EvalReport {
    let mut order: Vec<&SeedRecord> = records.iter().collect();
    order.sort_by_key(|r| r.seed_id);
    let stats = |values: Vec<f64>| -> (f64, f64) {
        if values.is_empty() {
            return (0.0, 0.0);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        (mean, var.sqrt())
    };
    let (mean_p, std_p) = stats(order.iter().map(|r| r.precision_at_k).collect());
    let (mean_n, std_n) = stats(order.iter().map(|r| r.ndcg_at_k).collect());
    EvalReport {
        k,
        n_seeds: records.len(),
        mean_precision_at_k: mean_p,
        std_precision_at_k: std_p,
        mean_ndcg_at_k: mean_n,
        std_ndcg_at_k: std_n,
        records,
    }
}

pub fn run_protocol(
    engine: &Engine,
    pair_scorer: Option<&dyn PairScorer>,
    cfg: &EvalConfig,
) -> Result<EvalReport, Error> {
    let seeds = sample_seeds(engine.corpus().len(), cfg.n_seeds, cfg.rng_seed)?;
    evaluate_seeds(engine, pair_scorer, cfg, &cfg.ranker, &seeds)
}

/// The 3 x 4 grid of candidate sizes and (semantic, lexical) weights.
pub fn default_grid() -> (Vec<usize>, Vec<(f64, f64)>) {
    (
        vec![80, 150, 250],
        vec![(0.7, 0.3), (0.6, 0.4), (0.5, 0.5), (0.4, 0.6)],
    )
}

/// One row per (candidate size, weight pair), all on the same seed sample.
pub fn sweep(
    engine: &Engine,
    cfg: &EvalConfig,
    candidate_sizes: &[usize],
    weight_pairs: &[(f64, f64)],
) -> Result<Vec<SweepRow>, Error> {
    let seeds = sample_seeds(engine.corpus().len(), cfg.n_seeds, cfg.rng_seed)?;
    let mut rows = Vec::with_capacity(candidate_sizes.len() * weight_pairs.len());
    for &candidates in candidate_sizes {
        for &(w_sem, w_lex) in weight_pairs {
            let ranker = RankerConfig {
                n_candidates: candidates,
                ..cfg.ranker.with_weights(w_sem, w_lex)
            };
            let report = evaluate_seeds(engine, None, cfg, &ranker, &seeds)?;
            rows.push(SweepRow {
                candidates,
                w_sem,
                w_lex,
                p_at_10: report.mean_precision_at_k,
                ndcg_at_10: report.mean_ndcg_at_k,
            });
        }
    }
    Ok(rows)
}

/// Baseline hybrid ranking against pair-scorer re-ranking on one seed sample.
pub fn compare_rerank(
    engine: &Engine,
    pair_scorer: &dyn PairScorer,
    cfg: &EvalConfig,
) -> Result<RerankComparison, Error> {
    let seeds = sample_seeds(engine.corpus().len(), cfg.n_seeds, cfg.rng_seed)?;
    let baseline_cfg = RankerConfig {
        rerank_enabled: false,
        ..cfg.ranker.clone()
    };
    let rerank_cfg = RankerConfig {
        rerank_enabled: true,
        ..cfg.ranker.clone()
    };
    let baseline = evaluate_seeds(engine, None, cfg, &baseline_cfg, &seeds)?;
    let reranked = evaluate_seeds(engine, Some(pair_scorer), cfg, &rerank_cfg, &seeds)?;
    Ok(RerankComparison {
        delta_p: reranked.mean_precision_at_k - baseline.mean_precision_at_k,
        delta_ndcg: reranked.mean_ndcg_at_k - baseline.mean_ndcg_at_k,
        baseline,
        reranked,
    })
}
