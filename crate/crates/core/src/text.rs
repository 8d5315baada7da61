//! Text normalization shared by corpus cleaning, query parsing and indexing.
//!
//! Every piece of text that reaches an index goes through [`normalize_text`]
//! followed by [`expand_abbreviations`], so the corpus and the query side see
//! the same token stream.

/// Characters that act as word separators rather than being deleted.
const SEPARATORS: &[char] = &['/', ',', '(', ')', '&', '-'];

/// Whole-token abbreviation table, applied once, left to right.
const ABBREVIATIONS: &[(&str, &str)] = &[
    ("ml", "machine learning"),
    ("ai", "artificial intelligence"),
    ("swe", "software engineer"),
    ("sde", "software engineer"),
    ("qa", "quality assurance"),
    ("pm", "product manager"),
    ("mle", "machine learning engineer"),
];

/// Lowercases, turns `/,()&-` into spaces, strips every other
/// non-alphanumeric character and collapses whitespace runs.
pub fn normalize_text(raw: &str) -> String {
    let mut mapped = String::with_capacity(raw.len());
    for ch in raw.chars().flat_map(char::to_lowercase) {
        if ch.is_alphanumeric() {
            mapped.push(ch);
        } else if ch.is_whitespace() || SEPARATORS.contains(&ch) {
            mapped.push(' ');
        }
    }
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Replaces whole-token abbreviations (`ml`, `swe`, ...) with their
/// expansions. Substrings of longer tokens are left alone.
pub fn expand_abbreviations(normalized: &str) -> String {
    normalized
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(|token| {
            ABBREVIATIONS
                .iter()
                .find(|(abbr, _)| *abbr == token)
                .map_or(token, |(_, full)| full)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Full cleaning pipeline for a single field or query.
pub fn clean_text(raw: &str) -> String {
    expand_abbreviations(&normalize_text(raw))
}

/// Splits normalized text on single spaces, dropping empty tokens.
/// No stemming, no stop words.
pub fn tokenize(text: &str) -> Vec<&str> {
    text.split(' ').filter(|t| !t.is_empty()).collect()
}

/// True when `needle` occurs in `haystack` as a run of whole tokens.
pub(crate) fn contains_phrase(haystack: &str, needle: &str) -> bool {
    if needle.is_empty() {
        return false;
    }
    let padded_hay = format!(" {haystack} ");
    let padded_needle = format!(" {needle} ");
    padded_hay.contains(&padded_needle)
}
