//! Duplicate suppression and per-company caps over a ranked list.

use std::collections::{HashMap, HashSet};

use crate::ingest::JobPosting;

/// Keeps the first (best-ranked) entry for each `(title, company, location)`.
pub fn deduplicate<T>(ranked: Vec<T>, posting_of: impl Fn(&T) -> &JobPosting) -> Vec<T> {
    let mut seen: HashSet<(String, String, String)> = HashSet::new();
    ranked
        .into_iter()
        .filter(|item| {
            let p = posting_of(item);
            seen.insert((p.title.clone(), p.company.clone(), p.location.clone()))
        })
        .collect()
}

/// Keeps at most `cap` entries per company, in order. Postings without a
/// company name are not capped.
pub fn company_diversify<T>(
    ranked: Vec<T>,
    cap: usize,
    posting_of: impl Fn(&T) -> &JobPosting,
) -> Vec<T> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    ranked
        .into_iter()
        .filter(|item| {
            let company = &posting_of(item).company;
            if company.is_empty() {
                return true;
            }
            let n = counts.entry(company.clone()).or_default();
            *n += 1;
            *n <= cap
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::PostingId;

    fn p(id: u32, title: &str, company: &str) -> (JobPosting, f64) {
        (
            JobPosting {
                id: PostingId(id),
                title: title.into(),
                company: company.into(),
                location: "london".into(),
                hiring_status: String::new(),
                posted_date: String::new(),
                seniority: String::new(),
                function: String::new(),
                employment_type: String::new(),
                industry: String::new(),
            },
            1.0 - f64::from(id) / 10.0,
        )
    }

    fn ids(v: &[(JobPosting, f64)]) -> Vec<u32> {
        v.iter().map(|(p, _)| p.id.0).collect()
    }

    #[test]
    fn dedup_keeps_first() {
        let list = vec![p(0, "a", "x"), p(1, "a", "x"), p(2, "b", "x")];
        let out = deduplicate(list, |(p, _)| p);
        assert_eq!(ids(&out), vec![0, 2]);
        assert_eq!(out[0].1, 1.0);
    }

    #[test]
    fn dedup_distinct_unchanged_and_triples() {
        let list = vec![p(0, "a", "x"), p(1, "b", "y")];
        assert_eq!(ids(&deduplicate(list, |(p, _)| p)), vec![0, 1]);
        let list = vec![p(0, "a", "x"), p(1, "a", "x"), p(2, "a", "x")];
        assert_eq!(ids(&deduplicate(list, |(p, _)| p)), vec![0]);
    }

    #[test]
    fn company_cap() {
        let list = vec![
            p(0, "a", "x"),
            p(1, "b", "x"),
            p(2, "c", "x"),
            p(3, "d", "y"),
        ];
        assert_eq!(
            ids(&company_diversify(list.clone(), 2, |(p, _)| p)),
            vec![0, 1, 3]
        );
        assert_eq!(
            ids(&company_diversify(list.clone(), 1, |(p, _)| p)),
            vec![0, 3]
        );
        assert_eq!(
            ids(&company_diversify(list, 5, |(p, _)| p)),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn blank_company_is_uncapped() {
        let list = vec![p(0, "a", ""), p(1, "b", ""), p(2, "c", "")];
        assert_eq!(ids(&company_diversify(list, 1, |(p, _)| p)), vec![0, 1, 2]);
    }
}
