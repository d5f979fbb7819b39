//! Per-scope summary indicators and per-publisher output statistics.
//!
//! A scope is either the whole corpus or one discipline. Per-discipline
//! counts use duplicated assignment (a record in k disciplines counts fully
//! in each), while the two "% of total" fields divide by distinct-record
//! totals, which makes the overlap explicit. Records in the unmapped bucket
//! take part only in the `All` scope.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::histogram::{build_histogram, BinningSpec, CitationHistogram, HistogramError};
use crate::record::{CitationRecord, Discipline};

#[derive(Debug, Error)]
pub enum IndicatorError {
    #[error("no records in scope {0}")]
    EmptyScope(String),
    #[error("top-k needs k >= 1")]
    ZeroK,
    #[error(transparent)]
    Histogram(#[from] HistogramError),
}

/// What slice of the corpus an indicator set describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    Discipline(Discipline),
}

impl Scope {
    pub fn label(&self) -> String {
        match self {
            Scope::All => "ALL".to_string(),
            Scope::Discipline(d) => d.code().to_string(),
        }
    }

    fn contains(&self, record: &CitationRecord) -> bool {
        match self {
            Scope::All => true,
            Scope::Discipline(d) => record.in_discipline(*d),
        }
    }
}

impl std::fmt::Display for Scope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// Which standard deviation the indicator set reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StdDevMode {
    Population,
    Sample,
}

#[derive(Debug, Clone)]
pub struct IndicatorConfig {
    pub stddev: StdDevMode,
    /// k used for the top-publisher coverage field.
    pub top_k: usize,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        IndicatorConfig {
            stddev: StdDevMode::Population,
            top_k: 20,
        }
    }
}

/// The ten summary indicators for one scope. Percentages are kept at full
/// precision; rendering rounds them.
#[derive(Debug, Clone, Serialize)]
pub struct IndicatorSet {
    pub scope: String,
    pub nr_bc: u64,
    pub pct_bc_of_total: f64,
    pub total_citations: u64,
    pub pct_citations_of_total: f64,
    pub citation_average: f64,
    pub citation_stddev: f64,
    pub nr_publishers: u64,
    pub pct_bc_top20: f64,
    pub max_citations: u64,
    pub pct_non_cited: f64,
}

/// Output and impact of one publisher within a scope.
#[derive(Debug, Clone)]
pub struct PublisherStats {
    pub publisher: String,
    pub nr_bc: u64,
    pub total_citations: u64,
    pub citation_average: f64,
    pub histogram: CitationHistogram,
}

fn in_scope(records: &[CitationRecord], scope: Scope) -> Vec<&CitationRecord> {
    records.iter().filter(|r| scope.contains(r)).collect()
}

fn stddev(citations: &[u64], mean: f64, mode: StdDevMode) -> f64 {
    let n = citations.len() as f64;
    let sum_sq_dev: f64 = citations
        .iter()
        .map(|&c| {
            let d = c as f64 - mean;
            d * d
        })
        .sum();
    match mode {
        StdDevMode::Population => (sum_sq_dev / n).sqrt(),
        StdDevMode::Sample => {
            if citations.len() < 2 {
                0.0
            } else {
                (sum_sq_dev / (n - 1.0)).sqrt()
            }
        }
    }
}

/// Compute the indicator set for a scope, with "% of total" fields taken
/// against the full (distinct) corpus.
pub fn compute_indicators(
    records: &[CitationRecord],
    scope: Scope,
) -> Result<IndicatorSet, IndicatorError> {
    compute_indicators_with(records, scope, &IndicatorConfig::default())
}

pub fn compute_indicators_with(
    records: &[CitationRecord],
    scope: Scope,
    config: &IndicatorConfig,
) -> Result<IndicatorSet, IndicatorError> {
    let scoped = in_scope(records, scope);
    if scoped.is_empty() {
        return Err(IndicatorError::EmptyScope(scope.label()));
    }
    let nr_bc = scoped.len() as u64;
    let citations: Vec<u64> = scoped.iter().map(|r| r.citations).collect();
    let total_citations: u64 = citations.iter().sum();
    let citation_average = total_citations as f64 / nr_bc as f64;
    let citation_stddev = stddev(&citations, citation_average, config.stddev);
    let max_citations = citations.iter().copied().max().unwrap_or(0);
    let non_cited = citations.iter().filter(|&&c| c == 0).count() as u64;

    let total_records = records.len() as u64;
    let total_corpus_citations: u64 = records.iter().map(|r| r.citations).sum();
    let pct_bc_of_total = 100.0 * nr_bc as f64 / total_records as f64;
    let pct_citations_of_total = if total_corpus_citations == 0 {
        0.0
    } else {
        100.0 * total_citations as f64 / total_corpus_citations as f64
    };

    let mut per_publisher: BTreeMap<&str, u64> = BTreeMap::new();
    for r in &scoped {
        *per_publisher.entry(r.publisher.as_str()).or_insert(0) += 1;
    }
    let nr_publishers = per_publisher.len() as u64;
    let mut counts: Vec<u64> = per_publisher.values().copied().collect();
    counts.sort_unstable_by_key(|c| std::cmp::Reverse(*c));
    let top_sum: u64 = counts.iter().take(config.top_k).sum();
    let pct_bc_top20 = 100.0 * top_sum as f64 / nr_bc as f64;

    Ok(IndicatorSet {
        scope: scope.label(),
        nr_bc,
        pct_bc_of_total,
        total_citations,
        pct_citations_of_total,
        citation_average,
        citation_stddev,
        nr_publishers,
        pct_bc_top20,
        max_citations,
        pct_non_cited: 100.0 * non_cited as f64 / nr_bc as f64,
    })
}

/// Per-publisher statistics for a scope, sorted by output descending with
/// alphabetical tie-breaks. Each entry carries the publisher's citation
/// histogram built with `binning`.
pub fn publisher_stats(
    records: &[CitationRecord],
    scope: Scope,
    binning: &BinningSpec,
) -> Result<Vec<PublisherStats>, IndicatorError> {
    let scoped = in_scope(records, scope);
    if scoped.is_empty() {
        return Err(IndicatorError::EmptyScope(scope.label()));
    }
    let mut grouped: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    for r in scoped {
        grouped
            .entry(r.publisher.as_str())
            .or_default()
            .push(r.citations);
    }
    let mut stats = Vec::with_capacity(grouped.len());
    for (publisher, citations) in grouped {
        let nr_bc = citations.len() as u64;
        let total_citations: u64 = citations.iter().sum();
        stats.push(PublisherStats {
            publisher: publisher.to_string(),
            nr_bc,
            total_citations,
            citation_average: total_citations as f64 / nr_bc as f64,
            histogram: build_histogram(&citations, binning, publisher)?,
        });
    }
    stats.sort_by(|a, b| {
        b.nr_bc
            .cmp(&a.nr_bc)
            .then_with(|| a.publisher.cmp(&b.publisher))
    });
    Ok(stats)
}

/// The k most productive publishers and the share of the scope's chapters
/// they cover. Asking for more publishers than exist returns them all.
pub fn top_publishers(
    stats: &[PublisherStats],
    k: usize,
) -> Result<(Vec<&PublisherStats>, f64), IndicatorError> {
    if k == 0 {
        return Err(IndicatorError::ZeroK);
    }
    if stats.is_empty() {
        return Err(IndicatorError::EmptyScope("publisher stats".to_string()));
    }
    let mut ordered: Vec<&PublisherStats> = stats.iter().collect();
    ordered.sort_by(|a, b| {
        b.nr_bc
            .cmp(&a.nr_bc)
            .then_with(|| a.publisher.cmp(&b.publisher))
    });
    let scope_total: u64 = ordered.iter().map(|s| s.nr_bc).sum();
    ordered.truncate(k);
    let top_total: u64 = ordered.iter().map(|s| s.nr_bc).sum();
    let coverage = 100.0 * top_total as f64 / scope_total as f64;
    Ok((ordered, coverage))
}

/// Delimited table with indicators as rows and scopes as columns.
/// Percentages render as whole percents, averages with two decimals.
pub fn indicators_table(sets: &[IndicatorSet]) -> String {
    fn pct(v: f64) -> String {
        format!("{}%", v.round() as i64)
    }
    let mut out = String::from("INDICATORS");
    for s in sets {
        out.push(',');
        out.push_str(&s.scope);
    }
    out.push('\n');
    let rows: [(&str, Vec<String>); 10] = [
        ("nr_bc", sets.iter().map(|s| s.nr_bc.to_string()).collect()),
        (
            "pct_bc_of_total",
            sets.iter().map(|s| pct(s.pct_bc_of_total)).collect(),
        ),
        (
            "total_citations",
            sets.iter().map(|s| s.total_citations.to_string()).collect(),
        ),
        (
            "pct_citations_of_total",
            sets.iter().map(|s| pct(s.pct_citations_of_total)).collect(),
        ),
        (
            "citation_average",
            sets.iter()
                .map(|s| format!("{:.2}", s.citation_average))
                .collect(),
        ),
        (
            "citation_stddev",
            sets.iter()
                .map(|s| format!("{:.2}", s.citation_stddev))
                .collect(),
        ),
        (
            "nr_publishers",
            sets.iter().map(|s| s.nr_publishers.to_string()).collect(),
        ),
        (
            "pct_bc_topk",
            sets.iter().map(|s| pct(s.pct_bc_top20)).collect(),
        ),
        (
            "max_citations",
            sets.iter().map(|s| s.max_citations.to_string()).collect(),
        ),
        (
            "pct_non_cited",
            sets.iter().map(|s| pct(s.pct_non_cited)).collect(),
        ),
    ];
    for (name, cells) in rows {
        out.push_str(name);
        for cell in cells {
            out.push(',');
            out.push_str(&cell);
        }
        out.push('\n');
    }
    out
}
