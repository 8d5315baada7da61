//! Library functions checked against brute-force reimplementations.

mod common;

use common::*;
use mjobs_core::embedding::{build_dense_index, embed_query, HashEmbedder};
use mjobs_core::eval::{ndcg_at_k, precision_at_k};
use mjobs_core::ingest::PostingId;
use mjobs_core::lexical::build_sparse_index;
use mjobs_core::Corpus;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn metrics_match_brute_force(grades in prop::collection::vec(0u8..=3, 1..50), k in 1usize..60) {
        let p = precision_at_k(&grades, k).unwrap();
        let n = ndcg_at_k(&grades, k).unwrap();
        prop_assert!((p - brute_precision(&grades, k)).abs() < 1e-12);
        prop_assert!((n - brute_ndcg(&grades, k)).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&n));
    }

    #[test]
    fn tfidf_matches_definition(seed in any::<u64>(), n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = Corpus::new(random_postings(&mut rng, n)).unwrap();
        let index = build_sparse_index(corpus.documents()).unwrap();
        let tokens = doc_tokens(&corpus);
        let ids: Vec<PostingId> = (0..n as u32).map(PostingId).collect();
        for _ in 0..5 {
            let q = random_query(&mut rng);
            let got = index.lexical_scores(&index.query_vector(&q), &ids).unwrap();
            let want = tfidf_scores(&tokens, &q);
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g - w).abs() < 1e-9, "{g} vs {w}");
            }
        }
    }

    #[test]
    fn nearest_neighbours_are_exact(seed in any::<u64>(), n_docs in 1usize..120, n in 1usize..150) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = Corpus::new(random_postings(&mut rng, n_docs)).unwrap();
        let embedder = HashEmbedder::new(32);
        let dense = build_dense_index(corpus.documents(), &embedder).unwrap();
        let q = embed_query(&embedder, &random_query(&mut rng).join(" ")).unwrap();
        let got = dense.semantic_candidates(&q, n).unwrap();
        let want = brute_force_nn(dense.as_slice(), 32, &q, n);
        prop_assert_eq!(got.len(), want.len());
        for ((gid, gs), (wid, ws)) in got.iter().zip(&want) {
            prop_assert_eq!(gid.0, *wid);
            prop_assert_eq!(gs.to_bits(), ws.to_bits());
        }
    }
}

#[test]
fn worked_ndcg_matches_oracle() {
    assert!((brute_ndcg(&[3, 0, 2], 3) - 0.95583).abs() < 1e-5);
    assert!((ndcg_at_k(&[3, 0, 2], 3).unwrap() - brute_ndcg(&[3, 0, 2], 3)).abs() < 1e-12);
}
