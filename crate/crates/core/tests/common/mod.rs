//! Brute-force oracles and fixtures shared by the integration tests.
//!
//! The oracles recompute each quantity from its definition with plain
//! loops and dense maps; they share no code with the library beyond its
//! public data types.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use mjobs_core::embedding::HashEmbedder;
use mjobs_core::ingest::PostingId;
use mjobs_core::synthetic::{self, SyntheticConfig};
use mjobs_core::{Engine, JobPosting};
use rand::seq::IndexedRandom;
use rand::Rng;

/// TF-IDF score of `query_tokens` against every document, by definition:
/// w(t, d) = tf(t, d) * ln(N / (df(t) + 1)), queries weighted alike, terms
/// outside the corpus vocabulary ignored.
pub fn tfidf_scores(docs: &[Vec<String>], query_tokens: &[String]) -> Vec<f64> {
    let n = docs.len() as f64;
    let mut df: HashMap<&str, f64> = HashMap::new();
    for d in docs {
        let uniq: HashSet<&str> = d.iter().map(String::as_str).collect();
        for t in uniq {
            *df.entry(t).or_insert(0.0) += 1.0;
        }
    }
    let weigh = |tokens: &[String]| -> BTreeMap<String, f64> {
        let mut tf: BTreeMap<String, f64> = BTreeMap::new();
        for t in tokens {
            if df.contains_key(t.as_str()) {
                *tf.entry(t.clone()).or_insert(0.0) += 1.0;
            }
        }
        tf.into_iter()
            .map(|(t, c)| {
                let w = c * (n / (df[t.as_str()] + 1.0)).ln();
                (t, w)
            })
            .collect()
    };
    let q = weigh(query_tokens);
    docs.iter()
        .map(|d| {
            let dv = weigh(d);
            q.iter()
                .map(|(t, w)| w * dv.get(t).copied().unwrap_or(0.0))
                .sum()
        })
        .collect()
}

/// Exhaustive top-`n` by inner product; ties by ascending row index.
pub fn brute_force_nn(rows: &[f32], dim: usize, query: &[f32], n: usize) -> Vec<(u32, f64)> {
    let mut all: Vec<(u32, f64)> = rows
        .chunks_exact(dim)
        .enumerate()
        .map(|(i, r)| {
            let mut s = 0.0f64;
            for j in 0..dim {
                s += f64::from(r[j]) * f64::from(query[j]);
            }
            (i as u32, s)
        })
        .collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    all.truncate(n);
    all
}

pub fn brute_precision(grades: &[u8], k: usize) -> f64 {
    let mut hits = 0usize;
    for i in 0..k {
        if i < grades.len() && grades[i] >= 2 {
            hits += 1;
        }
    }
    hits as f64 / k as f64
}

fn brute_dcg(grades: &[u8]) -> f64 {
    let mut s = 0.0;
    for (i, &g) in grades.iter().enumerate() {
        let gain = (1u32 << g) as f64 - 1.0;
        s += gain / ((i + 2) as f64).log2();
    }
    s
}

/// Ideal ordering built by repeatedly taking the largest remaining grade.
pub fn brute_ndcg(grades: &[u8], k: usize) -> f64 {
    let top: Vec<u8> = grades.iter().take(k).copied().collect();
    let mut pool = top.clone();
    let mut ideal = Vec::with_capacity(pool.len());
    while !pool.is_empty() {
        let (at, _) = pool
            .iter()
            .enumerate()
            .max_by_key(|&(i, g)| (*g, std::cmp::Reverse(i)))
            .unwrap();
        ideal.push(pool.remove(at));
    }
    let idcg = brute_dcg(&ideal);
    if idcg == 0.0 {
        0.0
    } else {
        brute_dcg(&top) / idcg
    }
}

pub const HASH_DIM: usize = 128;

pub fn synthetic_postings(size: usize, seed: u64) -> Vec<JobPosting> {
    synthetic::generate(&SyntheticConfig {
        size,
        seed,
        ..SyntheticConfig::default()
    })
}

/// Engine over the synthetic corpus with the synonym-aware hash embedder.
pub fn synthetic_engine(size: usize, seed: u64) -> Engine {
    let embedder = HashEmbedder::with_synonyms(HASH_DIM, synthetic::synonyms());
    Engine::build(synthetic_postings(size, seed), Box::new(embedder)).unwrap()
}

/// Queries phrased with synonyms of the titles used by the target family.
pub const SYNONYM_QUERIES: &[(&str, &str)] = &[
    ("programmer", "software"),
    ("coder", "software"),
    ("developer", "software"),
    ("analytics", "data"),
    ("teacher", "teaching"),
    ("nurse", "nursing"),
    ("software coder", "software"),
    ("instructor", "teaching"),
    ("analytics jobs", "data"),
];

/// Share of the top 10 whose posting belongs to `family`, denominator 10.
pub fn family_precision(results: &[mjobs_core::Recommendation], family: &str) -> f64 {
    let hits = results
        .iter()
        .take(10)
        .filter(|r| synthetic::family_of(&r.posting).map(|f| f.key) == Some(family))
        .count();
    hits as f64 / 10.0
}

const WORDS: &[&str] = &[
    "data", "analyst", "engineer", "software", "sales", "manager", "nurse", "london", "remote",
    "berlin", "senior", "entry", "level", "full", "time", "contract", "retail", "finance", "acme",
    "globex",
];

fn random_field<R: Rng>(rng: &mut R, max_tokens: usize) -> String {
    let n = rng.random_range(0..=max_tokens);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Small postings over a 20-word vocabulary, so terms repeat across
/// documents and some idf values are negative.
pub fn random_postings<R: Rng>(rng: &mut R, n: usize) -> Vec<JobPosting> {
    (0..n)
        .map(|i| {
            let mut title = random_field(rng, 3);
            if title.is_empty() {
                title = "clerk".into();
            }
            JobPosting {
                id: PostingId(i as u32),
                title,
                company: random_field(rng, 1),
                location: random_field(rng, 2),
                hiring_status: String::new(),
                posted_date: "2024-01-01".into(),
                seniority: random_field(rng, 2),
                function: random_field(rng, 1),
                employment_type: random_field(rng, 2),
                industry: random_field(rng, 1),
            }
        })
        .collect()
}

pub fn random_query<R: Rng>(rng: &mut R) -> Vec<String> {
    let n = rng.random_range(1..=4);
    (0..n)
        .map(|_| {
            if rng.random_bool(0.1) {
                "zzz".to_string()
            } else {
                WORDS.choose(rng).unwrap().to_string()
            }
        })
        .collect()
}

/// Whitespace tokens of every composite document.
pub fn doc_tokens(corpus: &mjobs_core::Corpus) -> Vec<Vec<String>> {
    corpus
        .documents()
        .iter()
        .map(|d| d.text.split_whitespace().map(str::to_string).collect())
        .collect()
}
