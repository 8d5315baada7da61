//! Seeded synthetic job corpus for tests, demos and the acceptance suite.
//!
//! Postings come from role families whose titles are near-synonyms
//! ("software developer", "application programmer", ...), plus distractor
//! families that share surface tokens with them ("civil engineer"). The
//! generator also injects exact (title, company, location) duplicates.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::builtin_job_synonyms;
use crate::ingest::{JobPosting, PostingId, REQUIRED_COLUMNS};

/// A group of interchangeable titles sharing function and industry.
#[derive(Debug, Clone, Copy)]
pub struct RoleFamily {
    pub key: &'static str,
    pub titles: &'static [&'static str],
    pub function: &'static str,
    pub industry: &'static str,
    pub weight: u32,
}

pub const FAMILIES: &[RoleFamily] = &[
    RoleFamily {
        key: "software",
        titles: &[
            "software engineer",
            "software developer",
            "backend developer",
            "application programmer",
            "java developer",
            "python developer",
            "web programmer",
            "backend engineer",
        ],
        function: "information technology",
        industry: "software development",
        weight: 6,
    },
    RoleFamily {
        key: "data",
        titles: &[
            "data analyst",
            "analytics consultant",
            "reporting analyst",
            "business intelligence analyst",
            "insights analyst",
        ],
        function: "analyst",
        industry: "financial services",
        weight: 4,
    },
    RoleFamily {
        key: "sales",
        titles: &[
            "sales manager",
            "commercial supervisor",
            "account manager",
            "sales representative",
            "business development manager",
        ],
        function: "sales",
        industry: "retail",
        weight: 4,
    },
    RoleFamily {
        key: "civil",
        titles: &["civil engineer", "structural engineer", "site engineer"],
        function: "engineering",
        industry: "construction",
        weight: 2,
    },
    RoleFamily {
        key: "nursing",
        titles: &["registered nurse", "staff nurse", "nurse practitioner"],
        function: "health care provider",
        industry: "hospitals and health care",
        weight: 2,
    },
    RoleFamily {
        key: "teaching",
        titles: &["math teacher", "english tutor", "science instructor"],
        function: "education",
        industry: "education",
        weight: 2,
    },
    RoleFamily {
        key: "admin",
        titles: &[
            "office administrator",
            "administrative assistant",
            "receptionist",
        ],
        function: "administrative",
        industry: "facilities services",
        weight: 2,
    },
    RoleFamily {
        key: "accounting",
        titles: &["accountant", "bookkeeper", "accounts payable clerk"],
        function: "accounting auditing",
        industry: "accounting",
        weight: 2,
    },
];

const LOCATIONS: &[&str] = &[
    "london",
    "london remote",
    "manchester",
    "manchester hybrid",
    "leeds",
    "new york ny",
    "new york ny remote",
    "austin tx",
    "austin tx hybrid",
    "berlin",
    "paris on site",
    "remote",
];

const SENIORITY: &[&str] = &[
    "internship",
    "entry level",
    "associate",
    "mid senior level",
    "director",
    "executive",
];

const EMPLOYMENT: &[&str] = &[
    "full time",
    "full time",
    "full time",
    "part time",
    "contract",
    "temporary",
];

const HIRING: &[&str] = &["actively hiring", "be an early applicant", ""];

const COMPANY_STEMS: &[&str] = &[
    "acme",
    "globex",
    "initech",
    "umbrella",
    "stark",
    "wayne",
    "tyrell",
    "cyberdyne",
    "soylent",
    "hooli",
    "vandelay",
    "wonka",
    "nakatomi",
    "oscorp",
    "aperture",
    "massive",
    "dunder",
    "prestige",
    "monarch",
    "gringotts",
];

const COMPANY_SUFFIXES: &[&str] = &["ltd", "group", "labs", "partners", "systems"];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub size: usize,
    pub seed: u64,
    /// Probability that a posting copies the title, company and location of
    /// an earlier one.
    pub duplicate_rate: f64,
    /// Probability that a posting has no company name.
    pub missing_company_rate: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            size: 500,
            seed: 42,
            duplicate_rate: 0.05,
            missing_company_rate: 0.02,
        }
    }
}

/// The synonym table that lets the hash embedder relate family titles.
pub fn synonyms() -> BTreeMap<String, String> {
    builtin_job_synonyms()
}

pub fn family(key: &str) -> Option<&'static RoleFamily> {
    FAMILIES.iter().find(|f| f.key == key)
}

/// Family a posting was generated from, recovered from its function field.
pub fn family_of(posting: &JobPosting) -> Option<&'static RoleFamily> {
    FAMILIES.iter().find(|f| f.function == posting.function)
}

/// Cleaned postings with ids `0..size`.
pub fn generate(cfg: &SyntheticConfig) -> Vec<JobPosting> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let companies: Vec<String> = COMPANY_STEMS
        .iter()
        .flat_map(|s| COMPANY_SUFFIXES.iter().map(move |x| format!("{s} {x}")))
        .collect();
    let mut out: Vec<JobPosting> = Vec::with_capacity(cfg.size);
    for i in 0..cfg.size {
        let fam = FAMILIES
            .choose_weighted(&mut rng, |f| f.weight)
            .expect("families are non-empty");
        let mut posting = JobPosting {
            id: PostingId(i as u32),
            title: (*fam.titles.choose(&mut rng).unwrap()).to_string(),
            company: if rng.random_bool(cfg.missing_company_rate) {
                String::new()
            } else {
                companies.choose(&mut rng).unwrap().clone()
            },
            location: (*LOCATIONS.choose(&mut rng).unwrap()).to_string(),
            hiring_status: (*HIRING.choose(&mut rng).unwrap()).to_string(),
            posted_date: format!(
                "2024-{:02}-{:02}",
                rng.random_range(1..=12),
                rng.random_range(1..=28)
            ),
            seniority: (*SENIORITY.choose(&mut rng).unwrap()).to_string(),
            function: fam.function.to_string(),
            employment_type: (*EMPLOYMENT.choose(&mut rng).unwrap()).to_string(),
            industry: fam.industry.to_string(),
        };
        if !out.is_empty() && rng.random_bool(cfg.duplicate_rate) {
            let src = &out[rng.random_range(0..out.len())];
            posting.title = src.title.clone();
            posting.company = src.company.clone();
            posting.location = src.location.clone();
            posting.function = src.function.clone();
            posting.industry = src.industry.clone();
        }
        out.push(posting);
    }
    out
}

/// Writes postings as a source CSV, appending `noise_rows` rows whose
/// titles the cleaner rejects.
pub fn write_csv<W: Write>(
    postings: &[JobPosting],
    noise_rows: usize,
    w: W,
) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(REQUIRED_COLUMNS)?;
    for p in postings {
        wtr.write_record([
            p.title.as_str(),
            &p.company,
            &p.location,
            &p.hiring_status,
            &p.posted_date,
            &p.seniority,
            &p.function,
            &p.employment_type,
            &p.industry,
        ])?;
    }
    for i in 0..noise_rows {
        let title = if i % 2 == 0 { "" } else { "###" };
        wtr.write_record([
            title,
            "noise co",
            "london",
            "",
            "2024-01-01",
            "",
            "",
            "",
            "",
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{clean_dataset, read_dataset};

    #[test]
    fn deterministic() {
        let cfg = SyntheticConfig::default();
        assert_eq!(generate(&cfg), generate(&cfg));
        let other = SyntheticConfig {
            seed: 7,
            ..cfg.clone()
        };
        assert_ne!(generate(&cfg), generate(&other));
    }

    #[test]
    fn has_duplicates_and_all_families() {
        let postings = generate(&SyntheticConfig::default());
        let mut keys: Vec<(&str, &str, &str)> = postings
            .iter()
            .map(|p| (p.title.as_str(), p.company.as_str(), p.location.as_str()))
            .collect();
        keys.sort();
        keys.dedup();
        assert!(keys.len() < postings.len());
        for f in FAMILIES {
            assert!(postings
                .iter()
                .any(|p| family_of(p).map(|x| x.key) == Some(f.key)));
        }
    }

    #[test]
    fn csv_survives_cleaning() {
        let postings = generate(&SyntheticConfig {
            size: 40,
            ..SyntheticConfig::default()
        });
        let mut buf = Vec::new();
        write_csv(&postings, 4, &mut buf).unwrap();
        let loaded = read_dataset(buf.as_slice()).unwrap();
        let (clean, report) = clean_dataset(&loaded);
        assert_eq!(clean, postings);
        assert_eq!(report.raw_count, 44);
        assert_eq!(report.removed_count, 4);
    }
}
