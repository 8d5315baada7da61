//! An immutable cleaned corpus with its composite documents and location
//! gazetteer.

use crate::ingest::{build_composite_document, CompositeDocument, JobPosting, PostingId};
use crate::query::LocationGazetteer;

#[derive(Debug, Clone)]
pub struct Corpus {
    postings: Vec<JobPosting>,
    documents: Vec<CompositeDocument>,
    gazetteer: LocationGazetteer,
}

impl Corpus {
    /// Fails if posting ids are not exactly `0..len` in order.
    pub fn new(postings: Vec<JobPosting>) -> Result<Self, String> {
        if let Some((i, p)) = postings
            .iter()
            .enumerate()
            .find(|(i, p)| p.id.index() != *i)
        {
            return Err(format!("posting at position {i} has id {}", p.id));
        }
        let documents = postings.iter().map(build_composite_document).collect();
        let gazetteer =
            LocationGazetteer::from_locations(postings.iter().map(|p| p.location.as_str()));
        Ok(Self {
            postings,
            documents,
            gazetteer,
        })
    }

    pub fn len(&self) -> usize {
        self.postings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.postings.is_empty()
    }

    pub fn postings(&self) -> &[JobPosting] {
        &self.postings
    }

    pub fn documents(&self) -> &[CompositeDocument] {
        &self.documents
    }

    pub fn gazetteer(&self) -> &LocationGazetteer {
        &self.gazetteer
    }

    pub fn get(&self, id: PostingId) -> Option<&JobPosting> {
        self.postings.get(id.index())
    }

    pub fn posting(&self, id: PostingId) -> &JobPosting {
        &self.postings[id.index()]
    }

    pub fn document(&self, id: PostingId) -> &CompositeDocument {
        &self.documents[id.index()]
    }
}
