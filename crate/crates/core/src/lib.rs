//! Citation-pattern analysis for book-chapter corpora.
//!
//! The pipeline runs from raw record files to rendered maps:
//!
//! 1. [`ingest`] parses record files, normalizes publisher names against an
//!    alias table and rolls subject categories up into four disciplines.
//! 2. [`indicators`] computes per-scope summary indicators and per-publisher
//!    output statistics.
//! 3. [`histogram`] characterizes a scope by its citation-probability
//!    histogram over bins `[l, l + Δl)`.
//! 4. [`infogain`] measures how much a publisher's citation distribution
//!    diverges from its discipline's and ranks publishers by that gain.
//! 5. [`lotka`] fits the power-law tail `φ(n) = C / n^α` of a histogram.
//! 6. [`heliomap`] lays publishers out on a radial map (clockwise by citation
//!    average, radius by gain, dot area by output) and renders it to SVG.
//! 7. [`synth`] generates seeded synthetic corpora with controlled
//!    uncitedness and tail exponents, so every stage has a ground truth to
//!    test against without any proprietary data.

pub mod heliomap;
pub mod histogram;
pub mod indicators;
pub mod infogain;
pub mod ingest;
pub mod lotka;
pub mod record;
pub mod synth;

pub use heliomap::{layout_map, render_svg, HelioConfig, HelioDot, HelioLayout};
pub use histogram::{align_support, build_histogram, BinningSpec, CitationHistogram};
pub use indicators::{
    compute_indicators, publisher_stats, top_publishers, IndicatorSet, PublisherStats, Scope,
};
pub use infogain::{information_gain, rank_by_gain, InfoGainResult, SmoothingPolicy};
pub use lotka::{fit_lotka, fit_report, lotka_predict, LotkaFit};
pub use record::{CitationRecord, Discipline};
pub use synth::SynthSpec;
