//! Query normalization and explicit filter extraction.
//!
//! Filters come from fixed trigger vocabularies matched on the normalized
//! query (two-token triggers before single tokens). Location hints use the
//! corpus's own locations as a gazetteer. Trigger tokens stay in the text
//! that is scored.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::text::{clean_text, contains_phrase, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorkMode {
    Remote,
    Hybrid,
    Onsite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeniorityLevel {
    Internship,
    Entry,
    Mid,
    Senior,
    Lead,
    Director,
    Executive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EmploymentType {
    #[serde(rename = "full-time")]
    FullTime,
    #[serde(rename = "part-time")]
    PartTime,
    #[serde(rename = "contract")]
    Contract,
    #[serde(rename = "temporary")]
    Temporary,
    #[serde(rename = "internship")]
    Internship,
}

macro_rules! str_enum {
    ($ty:ty { $($variant:ident => $s:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $(Self::$variant => $s),+ }
            }

            pub fn parse(s: &str) -> Option<Self> {
                match s { $($s => Some(Self::$variant),)+ _ => None }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

str_enum!(WorkMode { Remote => "remote", Hybrid => "hybrid", Onsite => "onsite" });
str_enum!(SeniorityLevel {
    Internship => "internship",
    Entry => "entry",
    Mid => "mid",
    Senior => "senior",
    Lead => "lead",
    Director => "director",
    Executive => "executive",
});
str_enum!(EmploymentType {
    FullTime => "full-time",
    PartTime => "part-time",
    Contract => "contract",
    Temporary => "temporary",
    Internship => "internship",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Effect {
    Work(WorkMode),
    Seniority(SeniorityLevel),
    Employment(EmploymentType),
}

/// Trigger phrases in their normalized form (hyphens already turned into
/// spaces, so `on-site` is `on site`).
const TRIGGERS: &[(&str, &[Effect])] = {
    use Effect::*;
    use EmploymentType as E;
    use SeniorityLevel as S;
    &[
        ("remote", &[Work(WorkMode::Remote)]),
        ("hybrid", &[Work(WorkMode::Hybrid)]),
        ("onsite", &[Work(WorkMode::Onsite)]),
        ("on site", &[Work(WorkMode::Onsite)]),
        ("office", &[Work(WorkMode::Onsite)]),
        ("intern", &[Seniority(S::Internship)]),
        (
            "internship",
            &[Seniority(S::Internship), Employment(E::Internship)],
        ),
        ("junior", &[Seniority(S::Entry)]),
        ("entry", &[Seniority(S::Entry)]),
        ("entry level", &[Seniority(S::Entry)]),
        ("graduate", &[Seniority(S::Entry)]),
        ("mid", &[Seniority(S::Mid)]),
        ("mid level", &[Seniority(S::Mid)]),
        ("associate", &[Seniority(S::Mid)]),
        ("senior", &[Seniority(S::Senior)]),
        ("sr", &[Seniority(S::Senior)]),
        ("lead", &[Seniority(S::Lead)]),
        ("principal", &[Seniority(S::Lead)]),
        ("staff", &[Seniority(S::Lead)]),
        ("director", &[Seniority(S::Director)]),
        ("vp", &[Seniority(S::Director)]),
        ("head", &[Seniority(S::Director)]),
        ("executive", &[Seniority(S::Executive)]),
        ("cxo", &[Seniority(S::Executive)]),
        ("chief", &[Seniority(S::Executive)]),
        ("full time", &[Employment(E::FullTime)]),
        ("fulltime", &[Employment(E::FullTime)]),
        ("part time", &[Employment(E::PartTime)]),
        ("contract", &[Employment(E::Contract)]),
        ("contractor", &[Employment(E::Contract)]),
        ("temporary", &[Employment(E::Temporary)]),
        ("temp", &[Employment(E::Temporary)]),
    ]
};

/// Longest trigger length in tokens.
const MAX_TRIGGER_TOKENS: usize = 2;
const MAX_LOCATION_NGRAM: usize = 3;

struct TriggerMatch {
    start: usize,
    len: usize,
    effects: &'static [Effect],
}

/// Left-to-right scan, longest trigger first at each position.
fn scan_triggers(tokens: &[&str]) -> Vec<TriggerMatch> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut matched = None;
        for len in (1..=MAX_TRIGGER_TOKENS.min(tokens.len() - i)).rev() {
            let phrase = tokens[i..i + len].join(" ");
            if let Some((_, effects)) = TRIGGERS.iter().find(|(t, _)| *t == phrase) {
                matched = Some(TriggerMatch {
                    start: i,
                    len,
                    effects,
                });
                break;
            }
        }
        match matched {
            Some(m) => {
                i += m.len;
                out.push(m);
            }
            None => i += 1,
        }
    }
    out
}

/// Canonical seniority of a normalized posting field, if any trigger occurs.
pub fn canonical_seniority(text: &str) -> Option<SeniorityLevel> {
    let tokens = tokenize(text);
    scan_triggers(&tokens)
        .iter()
        .flat_map(|m| m.effects.iter())
        .find_map(|e| match e {
            Effect::Seniority(s) => Some(*s),
            _ => None,
        })
}

/// Canonical employment type of a normalized posting field.
pub fn canonical_employment(text: &str) -> Option<EmploymentType> {
    let tokens = tokenize(text);
    scan_triggers(&tokens)
        .iter()
        .flat_map(|m| m.effects.iter())
        .find_map(|e| match e {
            Effect::Employment(x) => Some(*x),
            _ => None,
        })
}

/// True when any trigger phrase of `mode` occurs in `text`.
pub fn mentions_work_mode(text: &str, mode: WorkMode) -> bool {
    TRIGGERS
        .iter()
        .filter(|(_, effects)| effects.contains(&Effect::Work(mode)))
        .any(|(phrase, _)| contains_phrase(text, phrase))
}

/// Every whole-token n-gram (up to three tokens) of the corpus locations.
#[derive(Debug, Clone, Default)]
pub struct LocationGazetteer {
    ngrams: HashSet<String>,
}

impl LocationGazetteer {
    pub fn from_locations<'a, I: IntoIterator<Item = &'a str>>(locations: I) -> Self {
        let mut ngrams = HashSet::new();
        for loc in locations {
            let tokens = tokenize(loc);
            for start in 0..tokens.len() {
                for len in 1..=MAX_LOCATION_NGRAM.min(tokens.len() - start) {
                    ngrams.insert(tokens[start..start + len].join(" "));
                }
            }
        }
        Self { ngrams }
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.ngrams.contains(phrase)
    }

    pub fn len(&self) -> usize {
        self.ngrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ngrams.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    WorkMode,
    Seniority,
    Employment,
    Location,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AppliedFilter {
    pub kind: FilterKind,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedQuery {
    pub raw: String,
    pub normalized: String,
    pub tokens: Vec<String>,
    pub work_mode: Option<WorkMode>,
    pub seniority_filter: Option<SeniorityLevel>,
    pub employment_filter: Option<EmploymentType>,
    pub location_hint: Option<String>,
}

impl ParsedQuery {
    /// Filters currently set, in a fixed kind order.
    pub fn filters(&self) -> Vec<AppliedFilter> {
        let mut out = Vec::new();
        if let Some(m) = self.work_mode {
            out.push(AppliedFilter {
                kind: FilterKind::WorkMode,
                value: m.to_string(),
            });
        }
        if let Some(s) = self.seniority_filter {
            out.push(AppliedFilter {
                kind: FilterKind::Seniority,
                value: s.to_string(),
            });
        }
        if let Some(e) = self.employment_filter {
            out.push(AppliedFilter {
                kind: FilterKind::Employment,
                value: e.to_string(),
            });
        }
        if let Some(l) = &self.location_hint {
            out.push(AppliedFilter {
                kind: FilterKind::Location,
                value: l.clone(),
            });
        }
        out
    }

    pub fn has_filters(&self) -> bool {
        self.work_mode.is_some()
            || self.seniority_filter.is_some()
            || self.employment_filter.is_some()
            || self.location_hint.is_some()
    }

    pub fn apply_overrides(&mut self, o: &FilterOverrides) {
        if let Some(v) = o.work_mode {
            self.work_mode = v;
        }
        if let Some(v) = o.seniority {
            self.seniority_filter = v;
        }
        if let Some(v) = o.employment {
            self.employment_filter = v;
        }
        if let Some(v) = &o.location {
            self.location_hint = v.as_ref().map(|l| clean_text(l)).filter(|l| !l.is_empty());
        }
    }
}

/// Explicit filter settings that replace extraction. `None` keeps the
/// extracted value, `Some(None)` switches the filter off.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FilterOverrides {
    pub work_mode: Option<Option<WorkMode>>,
    pub seniority: Option<Option<SeniorityLevel>>,
    pub employment: Option<Option<EmploymentType>>,
    pub location: Option<Option<String>>,
}

pub fn parse_query(raw: &str, gazetteer: &LocationGazetteer) -> ParsedQuery {
    let normalized = clean_text(raw);
    let tokens = tokenize(&normalized);

    let mut work_mode = None;
    let mut seniority_filter = None;
    let mut employment_filter = None;
    let mut is_trigger = vec![false; tokens.len()];
    for m in scan_triggers(&tokens) {
        is_trigger[m.start..m.start + m.len]
            .iter_mut()
            .for_each(|t| *t = true);
        for effect in m.effects {
            match *effect {
                Effect::Work(w) => {
                    work_mode.get_or_insert(w);
                }
                Effect::Seniority(s) => {
                    seniority_filter.get_or_insert(s);
                }
                Effect::Employment(e) => {
                    employment_filter.get_or_insert(e);
                }
            }
        }
    }

    let mut location_hint: Option<String> = None;
    'outer: for len in (1..=MAX_LOCATION_NGRAM.min(tokens.len())).rev() {
        for start in 0..=tokens.len() - len {
            if is_trigger[start..start + len].iter().any(|&t| t) {
                continue;
            }
            let phrase = tokens[start..start + len].join(" ");
            if gazetteer.contains(&phrase) {
                location_hint = Some(phrase);
                break 'outer;
            }
        }
    }

    ParsedQuery {
        raw: raw.to_string(),
        tokens: tokens.iter().map(|t| (*t).to_string()).collect(),
        normalized: normalized.clone(),
        work_mode,
        seniority_filter,
        employment_filter,
        location_hint,
    }
}
