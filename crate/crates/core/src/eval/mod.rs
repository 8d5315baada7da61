//! Offline evaluation with metadata-derived relevance grades.
//!
//! Seed postings are sampled with a fixed RNG seed; each seed's normalized
//! title is issued as a query and the returned postings are graded against
//! the seed. Reports carry per-seed records plus mean and population
//! standard deviation of Precision@k and nDCG@k.

mod metrics;
mod protocol;
mod report;

pub use metrics::{dcg_at_k, grade_relevance, ndcg_at_k, precision_at_k, InvalidK, RelevanceGrade};
pub use protocol::{
    aggregate, compare_rerank, default_grid, run_protocol, sample_seeds, sweep, EvalConfig,
    EvalReport, RerankComparison, SeedRecord, SweepRow,
};
pub use report::{comparison_table, report_table, sweep_csv, sweep_table, SWEEP_CSV_HEADER};
