//! Record-file parsing, publisher-name normalization and discipline
//! assignment.
//!
//! The record file is UTF-8 delimited text with a required header row and
//! columns `record_id,publisher_raw,year,citations,categories,has_isbn,
//! has_issn` (categories semicolon-separated, flags 0/1). A record-per-line
//! JSON format with identical field names is accepted as well. Malformed
//! rows never abort a parse; they become per-line diagnostics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::record::{CitationRecord, Discipline};

pub const RECORD_HEADER: [&str; 7] = [
    "record_id",
    "publisher_raw",
    "year",
    "citations",
    "categories",
    "has_isbn",
    "has_issn",
];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unreadable delimited input: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad header: expected {expected:?}, found {found:?}")]
    Header { expected: String, found: String },
    #[error("publisher name is empty after trimming")]
    EmptyPublisher,
    #[error("alias table row {line} needs exactly 2 columns")]
    AliasRowArity { line: u64 },
    #[error("canonical name '{canonical}' is not a fixed point (it maps to '{maps_to}')")]
    AliasNotFixedPoint { canonical: String, maps_to: String },
    #[error("category map row {line} needs exactly 2 columns")]
    CategoryRowArity { line: u64 },
    #[error("category map row {line}: {source}")]
    CategoryBadDiscipline {
        line: u64,
        source: crate::record::ParseDisciplineError,
    },
    #[error("category '{0}' maps to an empty discipline set")]
    CategoryEmptySet(String),
}

/// A non-fatal, per-row problem. `line` is 0 when the problem is not tied
/// to an input line (e.g. raised during discipline assignment).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: u64,
    pub message: String,
}

impl Diagnostic {
    fn at(line: u64, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

/// Supported record-file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    /// Header + comma-separated rows.
    DelimitedText,
    /// One JSON object per line, same field names as the delimited header.
    RecordPerLine,
}

/// Collapse internal whitespace runs and trim the ends.
fn clean_name(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn fold_key(name: &str) -> String {
    clean_name(name).to_lowercase()
}

/// Raw publisher-name variants mapped to canonical names.
///
/// Matching is exact on the case-folded, whitespace-collapsed string; no
/// fuzzy matching. Canonical names are fixed points: looking one up returns
/// it unchanged.
#[derive(Debug, Clone, Default)]
pub struct AliasTable {
    entries: BTreeMap<String, String>,
}

impl AliasTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        raw: impl AsRef<str>,
        canonical: impl AsRef<str>,
    ) -> Result<(), IngestError> {
        let canonical = clean_name(canonical.as_ref());
        if canonical.is_empty() {
            return Err(IngestError::EmptyPublisher);
        }
        self.entries.insert(fold_key(raw.as_ref()), canonical);
        self.check_fixed_points()
    }

    /// Two-column delimited text `raw_name,canonical_name`. A header row
    /// with exactly those labels is skipped when present.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, IngestError> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(reader);
        let mut entries = BTreeMap::new();
        for (i, row) in csv_reader.records().enumerate() {
            let line = i as u64 + 1;
            let row = row?;
            if row.len() != 2 {
                return Err(IngestError::AliasRowArity { line });
            }
            if i == 0 && row[0].trim() == "raw_name" && row[1].trim() == "canonical_name" {
                continue;
            }
            let canonical = clean_name(&row[1]);
            if canonical.is_empty() {
                return Err(IngestError::EmptyPublisher);
            }
            entries.insert(fold_key(&row[0]), canonical);
        }
        let table = AliasTable { entries };
        table.check_fixed_points()?;
        Ok(table)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    fn check_fixed_points(&self) -> Result<(), IngestError> {
        for canonical in self.entries.values() {
            if let Some(mapped) = self.entries.get(&fold_key(canonical)) {
                if mapped != canonical {
                    return Err(IngestError::AliasNotFixedPoint {
                        canonical: canonical.clone(),
                        maps_to: mapped.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn canonical(&self, raw: &str) -> Option<&str> {
        self.entries.get(&fold_key(raw)).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Result of normalizing one raw publisher name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedPublisher {
    pub name: String,
    /// False when no alias entry matched and the cleaned raw name was kept.
    pub aliased: bool,
}

/// Normalize a raw publisher name against the alias table.
pub fn normalize_publisher(
    raw: &str,
    aliases: &AliasTable,
) -> Result<NormalizedPublisher, IngestError> {
    let cleaned = clean_name(raw);
    if cleaned.is_empty() {
        return Err(IngestError::EmptyPublisher);
    }
    match aliases.canonical(&cleaned) {
        Some(canonical) => Ok(NormalizedPublisher {
            name: canonical.to_string(),
            aliased: true,
        }),
        None => Ok(NormalizedPublisher {
            name: cleaned,
            aliased: false,
        }),
    }
}

/// Subject categories mapped to nonempty discipline sets.
#[derive(Debug, Clone, Default)]
pub struct CategoryMap {
    entries: BTreeMap<String, BTreeSet<Discipline>>,
}

impl CategoryMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        category: impl AsRef<str>,
        disciplines: impl IntoIterator<Item = Discipline>,
    ) -> Result<(), IngestError> {
        let set: BTreeSet<Discipline> = disciplines.into_iter().collect();
        let category = category.as_ref().trim().to_string();
        if set.is_empty() {
            return Err(IngestError::CategoryEmptySet(category));
        }
        self.entries.insert(category, set);
        Ok(())
    }

    /// Two-column delimited text `category,codes` with semicolon-separated
    /// discipline codes (AH, SCI, SOC, ET). A header row `category,
    /// disciplines` is skipped when present.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, IngestError> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(reader);
        let mut map = CategoryMap::new();
        for (i, row) in csv_reader.records().enumerate() {
            let line = i as u64 + 1;
            let row = row?;
            if row.len() != 2 {
                return Err(IngestError::CategoryRowArity { line });
            }
            if i == 0 && row[0].trim() == "category" && row[1].trim() == "disciplines" {
                continue;
            }
            let mut set = BTreeSet::new();
            for code in row[1].split(';').filter(|c| !c.trim().is_empty()) {
                let d = code
                    .parse::<Discipline>()
                    .map_err(|source| IngestError::CategoryBadDiscipline { line, source })?;
                set.insert(d);
            }
            let category = row[0].trim().to_string();
            if set.is_empty() {
                return Err(IngestError::CategoryEmptySet(category));
            }
            map.entries.insert(category, set);
        }
        Ok(map)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn get(&self, category: &str) -> Option<&BTreeSet<Discipline>> {
        self.entries.get(category.trim())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parsed records plus per-row diagnostics, in input row order.
#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub records: Vec<CitationRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    record_id: String,
    publisher_raw: String,
    year: i32,
    citations: u64,
    categories: Vec<String>,
    has_isbn: bool,
    has_issn: bool,
}

impl RawRecord {
    fn into_record(self) -> CitationRecord {
        CitationRecord {
            record_id: self.record_id,
            publisher_raw: self.publisher_raw,
            publisher: String::new(),
            year: self.year,
            citations: self.citations,
            categories: self
                .categories
                .into_iter()
                .map(|c| c.trim().to_string())
                .filter(|c| !c.is_empty())
                .collect(),
            disciplines: BTreeSet::new(),
            has_isbn: self.has_isbn,
            has_issn: self.has_issn,
        }
    }
}

fn parse_flag(field: &str) -> Option<bool> {
    match field.trim() {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

/// Deduplicate by record id: the later occurrence stays at its own row
/// position, the earlier one is dropped with a diagnostic.
struct Collector {
    slots: Vec<Option<(CitationRecord, u64)>>,
    by_id: HashMap<String, usize>,
    diagnostics: Vec<Diagnostic>,
}

impl Collector {
    fn new() -> Self {
        Collector {
            slots: Vec::new(),
            by_id: HashMap::new(),
            diagnostics: Vec::new(),
        }
    }

    fn push(&mut self, record: CitationRecord, line: u64) {
        if let Some(&slot) = self.by_id.get(&record.record_id) {
            let first_line = self.slots[slot].as_ref().map(|(_, l)| *l).unwrap_or(0);
            self.diagnostics.push(Diagnostic::at(
                line,
                format!(
                    "duplicate record_id '{}' (replaces line {first_line})",
                    record.record_id
                ),
            ));
            self.slots[slot] = None;
        }
        self.by_id
            .insert(record.record_id.clone(), self.slots.len());
        self.slots.push(Some((record, line)));
    }

    fn diagnostic(&mut self, line: u64, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::at(line, message));
    }

    fn finish(mut self) -> ParseOutcome {
        self.diagnostics.sort_by_key(|d| d.line);
        ParseOutcome {
            records: self
                .slots
                .into_iter()
                .flatten()
                .map(|(record, _)| record)
                .collect(),
            diagnostics: self.diagnostics,
        }
    }
}

/// Parse a record stream. Unreadable input and a bad header are fatal;
/// malformed rows are reported as diagnostics and skipped.
pub fn parse_records<R: Read>(
    reader: R,
    format: RecordFormat,
) -> Result<ParseOutcome, IngestError> {
    match format {
        RecordFormat::DelimitedText => parse_delimited(reader),
        RecordFormat::RecordPerLine => parse_jsonl(reader),
    }
}

fn parse_delimited<R: Read>(reader: R) -> Result<ParseOutcome, IngestError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    {
        let header = csv_reader.headers()?;
        let found: Vec<&str> = header.iter().map(str::trim).collect();
        if found != RECORD_HEADER {
            return Err(IngestError::Header {
                expected: RECORD_HEADER.join(","),
                found: found.join(","),
            });
        }
    }
    let mut collector = Collector::new();
    for (i, row) in csv_reader.records().enumerate() {
        // header occupies line 1
        let fallback_line = i as u64 + 2;
        let row = match row {
            Ok(row) => row,
            Err(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => {
                return Err(IngestError::Csv(e));
            }
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(fallback_line);
                collector.diagnostic(line, format!("malformed row: {e}"));
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(fallback_line);
        if row.len() != RECORD_HEADER.len() {
            collector.diagnostic(
                line,
                format!(
                    "expected {} fields, found {}",
                    RECORD_HEADER.len(),
                    row.len()
                ),
            );
            continue;
        }
        let record_id = row[0].trim().to_string();
        if record_id.is_empty() {
            collector.diagnostic(line, "empty record_id");
            continue;
        }
        if clean_name(&row[1]).is_empty() {
            collector.diagnostic(line, "empty publisher_raw");
            continue;
        }
        let year = match row[2].trim().parse::<i32>() {
            Ok(y) => y,
            Err(_) => {
                collector.diagnostic(line, format!("bad year '{}'", row[2].trim()));
                continue;
            }
        };
        let citations = match row[3].trim().parse::<u64>() {
            Ok(c) => c,
            Err(_) => {
                collector.diagnostic(
                    line,
                    format!(
                        "bad citations '{}' (non-negative integer required)",
                        row[3].trim()
                    ),
                );
                continue;
            }
        };
        let categories: Vec<String> = row[4]
            .split(';')
            .map(|c| c.trim().to_string())
            .filter(|c| !c.is_empty())
            .collect();
        let Some(has_isbn) = parse_flag(&row[5]) else {
            collector.diagnostic(
                line,
                format!("bad has_isbn '{}' (0/1 required)", row[5].trim()),
            );
            continue;
        };
        let Some(has_issn) = parse_flag(&row[6]) else {
            collector.diagnostic(
                line,
                format!("bad has_issn '{}' (0/1 required)", row[6].trim()),
            );
            continue;
        };
        collector.push(
            CitationRecord {
                record_id,
                publisher_raw: row[1].to_string(),
                publisher: String::new(),
                year,
                citations,
                categories,
                disciplines: BTreeSet::new(),
                has_isbn,
                has_issn,
            },
            line,
        );
    }
    Ok(collector.finish())
}

fn parse_jsonl<R: Read>(reader: R) -> Result<ParseOutcome, IngestError> {
    let reader = BufReader::new(reader);
    let mut collector = Collector::new();
    for (i, line_result) in reader.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line_result?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RawRecord>(&line) {
            Ok(raw) => {
                if raw.record_id.trim().is_empty() {
                    collector.diagnostic(line_no, "empty record_id");
                } else if clean_name(&raw.publisher_raw).is_empty() {
                    collector.diagnostic(line_no, "empty publisher_raw");
                } else {
                    collector.push(raw.into_record(), line_no);
                }
            }
            Err(e) => collector.diagnostic(line_no, format!("malformed row: {e}")),
        }
    }
    Ok(collector.finish())
}

/// Write records in the canonical delimited format (the inverse of
/// [`parse_records`] for the raw fields).
pub fn write_records<W: std::io::Write>(
    writer: W,
    records: &[CitationRecord],
) -> Result<(), IngestError> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record(RECORD_HEADER)?;
    for r in records {
        csv_writer.write_record([
            r.record_id.as_str(),
            r.publisher_raw.as_str(),
            &r.year.to_string(),
            &r.citations.to_string(),
            &r.categories.join(";"),
            if r.has_isbn { "1" } else { "0" },
            if r.has_issn { "1" } else { "0" },
        ])?;
    }
    csv_writer.flush()?;
    Ok(())
}

/// Populate a record's disciplines with the union of its categories'
/// mappings. Unknown categories produce diagnostics; a record whose
/// categories all miss lands in the unmapped bucket (empty set).
pub fn assign_disciplines(
    mut record: CitationRecord,
    map: &CategoryMap,
) -> (CitationRecord, Vec<Diagnostic>) {
    let mut diagnostics = Vec::new();
    let mut disciplines = BTreeSet::new();
    if record.categories.is_empty() {
        diagnostics.push(Diagnostic::at(
            0,
            format!(
                "record {}: no categories; assigned to unmapped bucket",
                record.record_id
            ),
        ));
    }
    for category in &record.categories {
        match map.get(category) {
            Some(set) => disciplines.extend(set.iter().copied()),
            None => diagnostics.push(Diagnostic::at(
                0,
                format!(
                    "record {}: category '{category}' not in category map",
                    record.record_id
                ),
            )),
        }
    }
    record.disciplines = disciplines;
    (record, diagnostics)
}

/// Full ingest report: normalized, discipline-assigned records plus all
/// diagnostics gathered along the way.
#[derive(Debug, Default)]
pub struct IngestReport {
    pub records: Vec<CitationRecord>,
    pub diagnostics: Vec<Diagnostic>,
    /// Records whose categories all failed to map.
    pub unmapped: u64,
    /// Cleaned publisher names that had no alias entry.
    pub unaliased: BTreeSet<String>,
}

/// Parse, normalize and assign in one pass.
pub fn ingest<R: Read>(
    reader: R,
    format: RecordFormat,
    aliases: &AliasTable,
    categories: &CategoryMap,
) -> Result<IngestReport, IngestError> {
    let outcome = parse_records(reader, format)?;
    let mut report = IngestReport {
        diagnostics: outcome.diagnostics,
        ..Default::default()
    };
    for record in outcome.records {
        let normalized = normalize_publisher(&record.publisher_raw, aliases)?;
        let mut record = record;
        record.publisher = normalized.name;
        if !normalized.aliased {
            report.unaliased.insert(record.publisher.clone());
        }
        let (record, mut diags) = assign_disciplines(record, categories);
        report.diagnostics.append(&mut diags);
        if record.is_unmapped() {
            report.unmapped += 1;
        }
        report.records.push(record);
    }
    Ok(report)
}
