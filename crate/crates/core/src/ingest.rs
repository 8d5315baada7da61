//! Corpus ingestion: CSV loading, record cleaning and composite documents.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::text::clean_text;

/// The nine source columns, in canonical order.
pub const REQUIRED_COLUMNS: [&str; 9] = [
    "job_title",
    "company_name",
    "location",
    "hiring_status",
    "date",
    "seniority_level",
    "job_function",
    "employment_type",
    "industry",
];

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("cannot read dataset: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed dataset: {0}")]
    Csv(String),
}

/// Stable identifier of a posting: its zero-based position in the cleaned corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PostingId(pub u32);

impl PostingId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PostingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One data row as read from the source file. Any field may be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawRecord {
    pub job_title: String,
    pub company_name: String,
    pub location: String,
    pub hiring_status: String,
    pub posted_date: String,
    pub seniority_level: String,
    pub job_function: String,
    pub employment_type: String,
    pub industry: String,
}

/// A cleaned posting. All text fields except `posted_date` are normalized.
///
/// Field order here is the key order of `corpus.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobPosting {
    pub id: PostingId,
    pub title: String,
    pub company: String,
    pub location: String,
    pub hiring_status: String,
    pub posted_date: String,
    pub seniority: String,
    pub function: String,
    pub employment_type: String,
    pub industry: String,
}

/// Title-weighted text used as the unit of indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeDocument {
    pub posting_id: PostingId,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RejectReason {
    EmptyTitle,
    NoisyTitle,
    ParseError,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::EmptyTitle => "empty_title",
            Self::NoisyTitle => "noisy_title",
            Self::ParseError => "parse_error",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub raw_count: usize,
    pub cleaned_count: usize,
    pub removed_count: usize,
    pub removal_reasons: BTreeMap<String, usize>,
}

/// Output of [`load_dataset`]: the parsed rows plus the 1-based data-row
/// numbers that could not be parsed.
#[derive(Debug, Clone, Default)]
pub struct LoadedDataset {
    pub records: Vec<RawRecord>,
    pub broken_rows: Vec<usize>,
}

impl LoadedDataset {
    pub fn raw_count(&self) -> usize {
        self.records.len() + self.broken_rows.len()
    }
}

pub fn load_dataset(path: &Path) -> Result<LoadedDataset, IngestError> {
    let file = std::fs::File::open(path)?;
    read_dataset(file)
}

/// Reads comma-separated UTF-8 with a header row. Column names are matched
/// case-insensitively after trimming; extra columns are ignored.
pub fn read_dataset<R: Read>(reader: R) -> Result<LoadedDataset, IngestError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = csv.headers().map_err(csv_error)?.clone();
    let header_names: Vec<String> = headers.iter().map(|h| h.trim().to_lowercase()).collect();
    let mut positions = [0usize; 9];
    for (slot, required) in positions.iter_mut().zip(REQUIRED_COLUMNS) {
        *slot = header_names
            .iter()
            .position(|h| h == required)
            .ok_or_else(|| IngestError::MissingColumn(required.to_string()))?;
    }

    let mut out = LoadedDataset::default();
    for (row, result) in csv.records().enumerate() {
        let row_number = row + 1;
        let record = match result {
            Ok(r) => r,
            Err(e) if e.is_io_error() => return Err(csv_error(e)),
            Err(_) => {
                out.broken_rows.push(row_number);
                continue;
            }
        };
        if record.len() != header_names.len() {
            out.broken_rows.push(row_number);
            continue;
        }
        let field = |i: usize| record.get(positions[i]).unwrap_or_default().to_string();
        out.records.push(RawRecord {
            job_title: field(0),
            company_name: field(1),
            location: field(2),
            hiring_status: field(3),
            posted_date: field(4),
            seniority_level: field(5),
            job_function: field(6),
            employment_type: field(7),
            industry: field(8),
        });
    }
    Ok(out)
}

fn csv_error(e: csv::Error) -> IngestError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => IngestError::Io(io),
            other => IngestError::Csv(format!("{other:?}")),
        }
    } else {
        IngestError::Csv(e.to_string())
    }
}

/// Cleans one record. A title that is blank in the source is `EmptyTitle`;
/// a title that is shorter than two characters or has no letter once
/// cleaned is `NoisyTitle`.
pub fn clean_record(raw: &RawRecord, id: PostingId) -> Result<JobPosting, RejectReason> {
    if raw.job_title.trim().is_empty() {
        return Err(RejectReason::EmptyTitle);
    }
    let title = clean_text(&raw.job_title);
    if title.chars().count() < 2 || !title.chars().any(char::is_alphabetic) {
        return Err(RejectReason::NoisyTitle);
    }
    Ok(JobPosting {
        id,
        title,
        company: clean_text(&raw.company_name),
        location: clean_text(&raw.location),
        hiring_status: clean_text(&raw.hiring_status),
        posted_date: raw.posted_date.clone(),
        seniority: clean_text(&raw.seniority_level),
        function: clean_text(&raw.job_function),
        employment_type: clean_text(&raw.employment_type),
        industry: clean_text(&raw.industry),
    })
}

/// `[title, title, company, location, seniority, function, employment, industry]`
/// joined by single spaces, empty fields skipped.
pub fn build_composite_document(posting: &JobPosting) -> CompositeDocument {
    let fields = [
        posting.title.as_str(),
        posting.title.as_str(),
        posting.company.as_str(),
        posting.location.as_str(),
        posting.seniority.as_str(),
        posting.function.as_str(),
        posting.employment_type.as_str(),
        posting.industry.as_str(),
    ];
    let text = fields
        .iter()
        .filter(|f| !f.is_empty())
        .copied()
        .collect::<Vec<_>>()
        .join(" ");
    CompositeDocument {
        posting_id: posting.id,
        text,
    }
}

/// Cleans every loaded record, assigning ids in order of survival.
pub fn clean_dataset(loaded: &LoadedDataset) -> (Vec<JobPosting>, IngestReport) {
    let mut postings = Vec::with_capacity(loaded.records.len());
    let mut reasons: BTreeMap<String, usize> = BTreeMap::new();
    if !loaded.broken_rows.is_empty() {
        reasons.insert(
            RejectReason::ParseError.as_str().to_string(),
            loaded.broken_rows.len(),
        );
    }
    for raw in &loaded.records {
        let id = PostingId(postings.len() as u32);
        match clean_record(raw, id) {
            Ok(p) => postings.push(p),
            Err(reason) => *reasons.entry(reason.as_str().to_string()).or_default() += 1,
        }
    }
    let raw_count = loaded.raw_count();
    let report = IngestReport {
        raw_count,
        cleaned_count: postings.len(),
        removed_count: raw_count - postings.len(),
        removal_reasons: reasons,
    };
    debug_assert_eq!(
        report.raw_count,
        report.cleaned_count + report.removed_count
    );
    (postings, report)
}

/// Loads and cleans a CSV file in one step.
pub fn ingest_file(path: &Path) -> Result<(Vec<JobPosting>, IngestReport), IngestError> {
    let loaded = load_dataset(path)?;
    Ok(clean_dataset(&loaded))
}
