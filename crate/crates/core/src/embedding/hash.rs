//! Deterministic feature-hashing embedder.
//!
//! Each token (optionally canonicalized through a synonym table) is hashed
//! with FNV-1a keyed by [`HASH_SEED`], finalized with the SplitMix64 mixer,
//! and mapped to a coordinate `h % D` with sign taken from the top bit. The
//! accumulated vector is L2-normalized. Output is identical on every
//! platform, so golden tests can pin it.

use std::collections::BTreeMap;
use std::hash::Hasher;

use fnv::FnvHasher;

use super::{l2_normalize, EmbedError, Embedder};
use crate::text::tokenize;

/// FNV-1a offset basis xor "mjobs".
pub const HASH_SEED: u64 = 0xcbf2_9ce4_8422_2325 ^ 0x006d_6a6f_6273;

/// Small default table folding common job-title variants together.
pub fn builtin_job_synonyms() -> BTreeMap<String, String> {
    [
        ("developer", "engineer"),
        ("programmer", "engineer"),
        ("coder", "engineer"),
        ("dev", "engineer"),
        ("analytics", "analyst"),
        ("mgr", "manager"),
        ("sr", "senior"),
        ("jr", "junior"),
        ("admin", "administrator"),
        ("tech", "technician"),
        ("rep", "representative"),
        ("bookkeeper", "accountant"),
        ("instructor", "teacher"),
        ("tutor", "teacher"),
        ("rn", "nurse"),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect()
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn token_hash(token: &str) -> u64 {
    let mut h = FnvHasher::with_key(HASH_SEED);
    h.write(token.as_bytes());
    splitmix64(h.finish())
}

#[derive(Debug, Clone)]
pub struct HashEmbedder {
    dimension: usize,
    synonyms: BTreeMap<String, String>,
    name: String,
}

impl HashEmbedder {
    /// # Panics
    /// When `dimension < 8`.
    pub fn new(dimension: usize) -> Self {
        Self::with_synonyms(dimension, BTreeMap::new())
    }

    pub fn with_synonyms(dimension: usize, synonyms: BTreeMap<String, String>) -> Self {
        assert!(dimension >= 8, "hash embedder needs at least 8 dimensions");
        let name = if synonyms.is_empty() {
            format!("hash-fnv1a-v1-d{dimension}")
        } else {
            let mut h = FnvHasher::with_key(HASH_SEED);
            for (k, v) in &synonyms {
                h.write(k.as_bytes());
                h.write_u8(0);
                h.write(v.as_bytes());
                h.write_u8(0);
            }
            format!("hash-fnv1a-v1-d{dimension}-syn{:016x}", h.finish())
        };
        Self {
            dimension,
            synonyms,
            name,
        }
    }

    pub fn synonyms(&self) -> &BTreeMap<String, String> {
        &self.synonyms
    }

    /// Unit vector for one normalized text.
    pub fn hash_embed(&self, text: &str) -> Vec<f32> {
        let mut acc = vec![0.0f64; self.dimension];
        for token in tokenize(text) {
            let canonical = self.synonyms.get(token).map_or(token, String::as_str);
            let h = token_hash(canonical);
            let slot = (h % self.dimension as u64) as usize;
            acc[slot] += if h >> 63 == 0 { 1.0 } else { -1.0 };
        }
        let mut v: Vec<f32> = acc.into_iter().map(|x| x as f32).collect();
        l2_normalize(&mut v);
        v
    }
}

impl Embedder for HashEmbedder {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn encode_batch(&self, texts: &[&str]) -> Result<Vec<Vec<f32>>, EmbedError> {
        Ok(texts.iter().map(|t| self.hash_embed(t)).collect())
    }
}
