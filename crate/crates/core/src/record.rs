//! Record types shared across the toolkit.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The four macro areas every subject category rolls up into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Discipline {
    #[serde(rename = "AH")]
    ArtsHumanities,
    #[serde(rename = "SCI")]
    Science,
    #[serde(rename = "SOC")]
    SocialSciences,
    #[serde(rename = "ET")]
    EngineeringTechnology,
}

impl Discipline {
    pub const ALL: [Discipline; 4] = [
        Discipline::ArtsHumanities,
        Discipline::Science,
        Discipline::SocialSciences,
        Discipline::EngineeringTechnology,
    ];

    /// Short code used in category-map files, CLI flags and output names.
    pub fn code(self) -> &'static str {
        match self {
            Discipline::ArtsHumanities => "AH",
            Discipline::Science => "SCI",
            Discipline::SocialSciences => "SOC",
            Discipline::EngineeringTechnology => "ET",
        }
    }

    /// Human-readable name.
    pub fn label(self) -> &'static str {
        match self {
            Discipline::ArtsHumanities => "Arts & Humanities",
            Discipline::Science => "Science",
            Discipline::SocialSciences => "Social Sciences",
            Discipline::EngineeringTechnology => "Engineering & Technology",
        }
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown discipline code '{0}' (expected AH, SCI, SOC or ET)")]
pub struct ParseDisciplineError(pub String);

impl FromStr for Discipline {
    type Err = ParseDisciplineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "AH" => Ok(Discipline::ArtsHumanities),
            "SCI" => Ok(Discipline::Science),
            "SOC" => Ok(Discipline::SocialSciences),
            "ET" => Ok(Discipline::EngineeringTechnology),
            other => Err(ParseDisciplineError(other.to_string())),
        }
    }
}

/// One book chapter as it flows through the pipeline.
///
/// `publisher` is the canonical name and is empty until normalization has
/// run; `disciplines` is empty until category assignment has run, and an
/// empty set after assignment means the record sits in the unmapped bucket,
/// which is excluded from all per-discipline totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationRecord {
    pub record_id: String,
    pub publisher_raw: String,
    pub publisher: String,
    pub year: i32,
    pub citations: u64,
    pub categories: Vec<String>,
    pub disciplines: BTreeSet<Discipline>,
    pub has_isbn: bool,
    pub has_issn: bool,
}

impl CitationRecord {
    /// True when discipline assignment found no mapped category.
    pub fn is_unmapped(&self) -> bool {
        self.disciplines.is_empty()
    }

    pub fn in_discipline(&self, discipline: Discipline) -> bool {
        self.disciplines.contains(&discipline)
    }
}
