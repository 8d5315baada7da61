use crate::corpus::Corpus;
use crate::embedding::{build_dense_index, DenseIndex, Embedder};
use crate::ingest::JobPosting;
use crate::lexical::{build_sparse_index, SparseIndex};
use crate::ranker::{
    check_indexes, recommend, PairScorer, RankerConfig, RecommendOptions, RecommendOutput,
};
use crate::Error;

/// A corpus with both indexes and the embedder used to build them.
pub struct Engine {
    corpus: Corpus,
    sparse: SparseIndex,
    dense: DenseIndex,
    embedder: Box<dyn Embedder>,
}

impl Engine {
    pub fn build(postings: Vec<JobPosting>, embedder: Box<dyn Embedder>) -> Result<Self, Error> {
        let corpus = Corpus::new(postings).map_err(Error::Corpus)?;
        let sparse = build_sparse_index(corpus.documents())?;
        let dense = build_dense_index(corpus.documents(), embedder.as_ref())?;
        Ok(Self {
            corpus,
            sparse,
            dense,
            embedder,
        })
    }

    pub fn from_parts(
        corpus: Corpus,
        sparse: SparseIndex,
        dense: DenseIndex,
        embedder: Box<dyn Embedder>,
    ) -> Result<Self, Error> {
        check_indexes(&corpus, &sparse, &dense, embedder.as_ref())?;
        Ok(Self {
            corpus,
            sparse,
            dense,
            embedder,
        })
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn sparse(&self) -> &SparseIndex {
        &self.sparse
    }

    pub fn dense(&self) -> &DenseIndex {
        &self.dense
    }

    pub fn embedder(&self) -> &dyn Embedder {
        self.embedder.as_ref()
    }

    pub fn recommend(
        &self,
        query: &str,
        pair_scorer: Option<&dyn PairScorer>,
        cfg: &RankerConfig,
        opts: &RecommendOptions,
    ) -> Result<RecommendOutput, Error> {
        Ok(recommend(
            query,
            &self.corpus,
            &self.sparse,
            &self.dense,
            self.embedder.as_ref(),
            pair_scorer,
            cfg,
            opts,
        )?)
    }
}
