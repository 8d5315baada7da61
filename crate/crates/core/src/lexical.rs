//! TF-IDF sparse index over composite documents.
//!
//! Weights are `tf(t,d) * ln(N / (df(t) + 1))` with raw term counts. The
//! `+1` smoothing makes terms present in every document (or all but one)
//! carry zero or negative weight; those values are stored as computed.

use std::collections::HashMap;

use crate::ingest::{CompositeDocument, PostingId};
pub use crate::text::tokenize;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LexicalError {
    #[error("cannot build an index over an empty corpus")]
    EmptyCorpus,
    #[error("unknown document {0}")]
    UnknownDocument(PostingId),
}

/// Term dictionary with document frequencies. Term ids are dense and
/// assigned in order of first appearance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    df: Vec<u32>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    /// Rebuilds a vocabulary from `(term, df)` pairs given in term-id order.
    pub fn from_entries(entries: Vec<(String, u32)>) -> Self {
        let mut vocab = Self::default();
        for (term, df) in entries {
            vocab.ids.insert(term.clone(), vocab.terms.len() as u32);
            vocab.terms.push(term);
            vocab.df.push(df);
        }
        vocab
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: u32) -> &str {
        &self.terms[id as usize]
    }

    pub fn df(&self, id: u32) -> u32 {
        self.df[id as usize]
    }

    /// `(term, term_id, df)` in id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u32, u32)> + '_ {
        self.terms
            .iter()
            .zip(&self.df)
            .enumerate()
            .map(|(i, (t, &df))| (t.as_str(), i as u32, df))
    }
}

/// Sparse vector as `(term_id, weight)` pairs with strictly increasing ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    pub entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, term_id: u32) -> Option<f64> {
        self.entries
            .binary_search_by_key(&term_id, |&(t, _)| t)
            .ok()
            .map(|i| self.entries[i].1)
    }
}

/// Document vectors in compressed-sparse-row layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseIndex {
    vocabulary: Vocabulary,
    num_documents: usize,
    row_offsets: Vec<u64>,
    term_ids: Vec<u32>,
    weights: Vec<f64>,
}

/// `ln(N / (df + 1))`.
#[inline]
pub fn idf(num_documents: usize, df: u32) -> f64 {
    (num_documents as f64 / (f64::from(df) + 1.0)).ln()
}

/// Counts tokens, returning `(term, count)` in order of first appearance.
fn term_counts(text: &str) -> Vec<(&str, u32)> {
    let mut order: Vec<(&str, u32)> = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for tok in tokenize(text) {
        match seen.get(tok) {
            Some(&i) => order[i].1 += 1,
            None => {
                seen.insert(tok, order.len());
                order.push((tok, 1));
            }
        }
    }
    order
}

pub fn build_sparse_index(docs: &[CompositeDocument]) -> Result<SparseIndex, LexicalError> {
    if docs.is_empty() {
        return Err(LexicalError::EmptyCorpus);
    }
    let mut terms: Vec<String> = Vec::new();
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut df: Vec<u32> = Vec::new();
    let mut rows: Vec<Vec<(u32, u32)>> = Vec::with_capacity(docs.len());

    for doc in docs {
        let mut row = Vec::new();
        for (term, count) in term_counts(&doc.text) {
            let id = match ids.get(term) {
                Some(&id) => id,
                None => {
                    let id = terms.len() as u32;
                    ids.insert(term.to_string(), id);
                    terms.push(term.to_string());
                    df.push(0);
                    id
                }
            };
            df[id as usize] += 1;
            row.push((id, count));
        }
        row.sort_unstable_by_key(|&(id, _)| id);
        rows.push(row);
    }

    let n = docs.len();
    let idf_table: Vec<f64> = df.iter().map(|&d| idf(n, d)).collect();
    let nnz = rows.iter().map(Vec::len).sum();
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut term_ids = Vec::with_capacity(nnz);
    let mut weights = Vec::with_capacity(nnz);
    row_offsets.push(0);
    for row in rows {
        for (id, count) in row {
            term_ids.push(id);
            weights.push(f64::from(count) * idf_table[id as usize]);
        }
        row_offsets.push(term_ids.len() as u64);
    }

    Ok(SparseIndex {
        vocabulary: Vocabulary { terms, df, ids },
        num_documents: n,
        row_offsets,
        term_ids,
        weights,
    })
}

impl SparseIndex {
    /// Reassembles an index from its stored parts, checking CSR structure.
    pub fn from_parts(
        vocabulary: Vocabulary,
        row_offsets: Vec<u64>,
        term_ids: Vec<u32>,
        weights: Vec<f64>,
    ) -> Result<Self, String> {
        if row_offsets.first() != Some(&0) {
            return Err("row offsets must start at 0".into());
        }
        if term_ids.len() != weights.len() {
            return Err("term id and weight arrays differ in length".into());
        }
        if *row_offsets.last().unwrap() as usize != term_ids.len() {
            return Err("last row offset does not match entry count".into());
        }
        for w in row_offsets.windows(2) {
            if w[0] > w[1] {
                return Err("row offsets are not monotone".into());
            }
            let row = &term_ids[w[0] as usize..w[1] as usize];
            if row.windows(2).any(|p| p[0] >= p[1]) {
                return Err("term ids within a row are not strictly increasing".into());
            }
        }
        if term_ids.iter().any(|&t| t as usize >= vocabulary.len()) {
            return Err("term id outside vocabulary".into());
        }
        Ok(Self {
            vocabulary,
            num_documents: row_offsets.len() - 1,
            row_offsets,
            term_ids,
            weights,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn num_documents(&self) -> usize {
        self.num_documents
    }

    pub fn row_offsets(&self) -> &[u64] {
        &self.row_offsets
    }

    pub fn term_ids(&self) -> &[u32] {
        &self.term_ids
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nnz(&self) -> usize {
        self.term_ids.len()
    }

    /// Stored row for a document.
    pub fn document(&self, id: PostingId) -> Option<(&[u32], &[f64])> {
        let i = id.index();
        if i >= self.num_documents {
            return None;
        }
        let (lo, hi) = (
            self.row_offsets[i] as usize,
            self.row_offsets[i + 1] as usize,
        );
        Some((&self.term_ids[lo..hi], &self.weights[lo..hi]))
    }

    /// Weights query tokens the same way documents are weighted;
    /// out-of-vocabulary tokens are dropped.
    pub fn query_vector<S: AsRef<str>>(&self, query_tokens: &[S]) -> SparseVector {
        let mut counts: HashMap<u32, u32> = HashMap::new();
        for tok in query_tokens {
            if let Some(id) = self.vocabulary.id(tok.as_ref()) {
                *counts.entry(id).or_default() += 1;
            }
        }
        let mut entries: Vec<(u32, f64)> = counts
            .into_iter()
            .map(|(id, tf)| {
                (
                    id,
                    f64::from(tf) * idf(self.num_documents, self.vocabulary.df(id)),
                )
            })
            .collect();
        entries.sort_unstable_by_key(|&(id, _)| id);
        SparseVector { entries }
    }

    /// Sparse dot product of the query against each candidate, aligned with
    /// `candidates`. Only the candidates are touched.
    pub fn lexical_scores(
        &self,
        query: &SparseVector,
        candidates: &[PostingId],
    ) -> Result<Vec<f64>, LexicalError> {
        candidates
            .iter()
            .map(|&id| {
                let (terms, weights) =
                    self.document(id).ok_or(LexicalError::UnknownDocument(id))?;
                Ok(sparse_dot(&query.entries, terms, weights))
            })
            .collect()
    }
}

fn sparse_dot(query: &[(u32, f64)], terms: &[u32], weights: &[f64]) -> f64 {
    let mut score = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < query.len() && j < terms.len() {
        match query[i].0.cmp(&terms[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                score += query[i].1 * weights[j];
                i += 1;
                j += 1;
            }
        }
    }
    score
}
