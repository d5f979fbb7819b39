//! The end-to-end run: ingest, then per discipline indicators, histograms,
//! gain ranking, Lotka fit, layout and SVG map, finished by a manifest that
//! digests every artifact. A failed discipline leaves the manifest marked
//! incomplete rather than silently partial.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use citemap::heliomap::{
    flag_outliers, layout_map, render_svg, HelioConfig, OutlierConfig, SvgStyle,
};
use citemap::histogram::build_histogram;
use citemap::indicators::{
    compute_indicators_with, publisher_stats, IndicatorConfig, PublisherStats, Scope,
};
use citemap::infogain::{rank_by_gain, ranking_table};
use citemap::ingest::{ingest, AliasTable, CategoryMap, IngestReport};
use citemap::lotka::{fit_lotka, fit_report};
use citemap::record::CitationRecord;
use serde::Serialize;

use crate::config::RunConfig;
use crate::manifest::{digest_bytes, write_manifest, ManifestEntry};
use crate::CliError;

pub struct PipelineOutcome {
    pub manifest_path: PathBuf,
    pub outputs: Vec<ManifestEntry>,
    /// Human-readable outlier flags, per discipline, already printed.
    pub flags: Vec<String>,
}

pub fn load_corpus(config: &RunConfig) -> Result<IngestReport, CliError> {
    let aliases = match &config.aliases {
        Some(path) => AliasTable::from_path(path)
            .map_err(|e| CliError::Data(format!("alias table {}: {e}", path.display())))?,
        None => AliasTable::new(),
    };
    let categories = CategoryMap::from_path(&config.categories).map_err(|e| {
        CliError::Data(format!("category map {}: {e}", config.categories.display()))
    })?;
    let file = std::fs::File::open(&config.records)
        .map_err(|e| CliError::Data(format!("records {}: {e}", config.records.display())))?;
    ingest(
        file,
        config.format.to_record_format(),
        &aliases,
        &categories,
    )
    .map_err(|e| CliError::Data(format!("ingest: {e}")))
}

fn emit(
    dir: &Path,
    name: &str,
    contents: &str,
    outputs: &mut Vec<ManifestEntry>,
) -> Result<(), CliError> {
    std::fs::write(dir.join(name), contents)
        .map_err(|e| CliError::Data(format!("cannot write {name}: {e}")))?;
    outputs.push(ManifestEntry {
        path: name.to_string(),
        sha256: digest_bytes(contents.as_bytes()),
    });
    Ok(())
}

fn json_line<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(format!("serialization: {e}")))?;
    text.push('\n');
    Ok(text)
}

#[derive(Serialize)]
struct LotkaArtifact<'a> {
    fit: &'a citemap::lotka::LotkaFit,
    report: &'a [citemap::lotka::FitReportRow],
}

fn publisher_histograms_table(stats: &[&PublisherStats]) -> String {
    let mut out = String::from("publisher,l_lower,l_upper,count,probability\n");
    for s in stats {
        for line in s.histogram.to_delimited().lines().skip(1) {
            out.push_str(&format!("{},{line}\n", s.publisher));
        }
    }
    out
}

fn run_discipline(
    config: &RunConfig,
    report: &IngestReport,
    discipline: citemap::record::Discipline,
    out_dir: &Path,
    outputs: &mut Vec<ManifestEntry>,
    flag_lines: &mut Vec<String>,
) -> Result<(), CliError> {
    let code = discipline.code();
    let scope = Scope::Discipline(discipline);
    let data = |e: &dyn std::fmt::Display| CliError::Data(format!("{code}: {e}"));

    let indicator_config = IndicatorConfig {
        top_k: config.top_k,
        ..Default::default()
    };
    let indicators =
        compute_indicators_with(&report.records, scope, &indicator_config).map_err(|e| data(&e))?;
    emit(
        out_dir,
        &format!("{code}_indicators.json"),
        &json_line(&indicators)?,
        outputs,
    )?;

    let scoped: Vec<&CitationRecord> = report
        .records
        .iter()
        .filter(|r| r.in_discipline(discipline))
        .collect();
    let citations: Vec<u64> = scoped.iter().map(|r| r.citations).collect();
    let discipline_hist =
        build_histogram(&citations, &config.binning, code).map_err(|e| data(&e))?;
    emit(
        out_dir,
        &format!("{code}_histogram.csv"),
        &discipline_hist.to_delimited(),
        outputs,
    )?;

    let stats = publisher_stats(&report.records, scope, &config.binning).map_err(|e| data(&e))?;

    // ranking covers the top-k regardless of exclusions; the map replaces
    // excluded publishers with the next most productive ones, so gains are
    // computed over the union of both sets
    let ranking_set: Vec<&PublisherStats> = stats.iter().take(config.top_k).collect();
    let map_set: Vec<&PublisherStats> = stats
        .iter()
        .filter(|s| !config.map.exclude.contains(&s.publisher))
        .take(config.top_k)
        .collect();
    let mut gain_labels = BTreeSet::new();
    let mut gain_inputs = Vec::new();
    for s in ranking_set.iter().chain(map_set.iter()) {
        if gain_labels.insert(s.publisher.clone()) {
            gain_inputs.push((s.publisher.clone(), s.histogram.clone()));
        }
    }
    let (gains, failures) = rank_by_gain(
        &discipline_hist,
        &gain_inputs,
        config.gain.effective_scale(),
        config.gain.smoothing.to_policy(),
    );
    for (label, error) in &failures {
        eprintln!("warning: {code}: gain for '{label}' failed: {error}");
    }

    emit(
        out_dir,
        &format!("{code}_publisher_histograms.csv"),
        &publisher_histograms_table(&ranking_set),
        outputs,
    )?;

    let ranking_labels: BTreeSet<&str> = ranking_set.iter().map(|s| s.publisher.as_str()).collect();
    let ranked_rows: Vec<citemap::infogain::InfoGainResult> = gains
        .iter()
        .filter(|g| ranking_labels.contains(g.input.as_str()))
        .cloned()
        .collect();
    emit(
        out_dir,
        &format!("{code}_gain_ranking.csv"),
        &ranking_table(&ranked_rows, &stats, &config.map.exclude),
        outputs,
    )?;

    let fit = fit_lotka(&discipline_hist).map_err(|e| data(&e))?;
    let rows = fit_report(&discipline_hist, &fit);
    emit(
        out_dir,
        &format!("{code}_lotka.json"),
        &json_line(&LotkaArtifact {
            fit: &fit,
            report: &rows,
        })?,
        outputs,
    )?;

    let scoped_records: Vec<CitationRecord> = scoped.iter().map(|r| (*r).clone()).collect();
    let flags = flag_outliers(
        &discipline_hist,
        &stats,
        &gains,
        &scoped_records,
        &OutlierConfig::default(),
    );
    let mut flagged = BTreeSet::new();
    for flag in &flags {
        flagged.insert(flag.label.clone());
        for reason in &flag.reasons {
            let line = format!("{code}: outlier flag: {} ({reason:?})", flag.label);
            println!("{line}");
            flag_lines.push(line);
        }
    }

    let helio_config = HelioConfig {
        k: config.top_k,
        r_min: config.map.r_min,
        r_max: config.map.r_max,
        area_max: config.map.area_max,
        radius_scale: config.map.radius_scale,
        exclude: config.map.exclude.clone(),
        flagged,
    };
    let layout =
        layout_map(&discipline_hist, &stats, &gains, &helio_config).map_err(|e| data(&e))?;
    emit(
        out_dir,
        &format!("{code}_layout.json"),
        &json_line(&layout)?,
        outputs,
    )?;

    let style = SvgStyle {
        width: config.map.width,
        height: config.map.height,
        ..Default::default()
    };
    let svg = render_svg(&layout, &style).map_err(|e| data(&e))?;
    emit(out_dir, &format!("{code}_map.svg"), &svg, outputs)?;

    Ok(())
}

/// Run the whole pipeline under a validated config. On any module failure
/// the manifest is still written, marked incomplete, before the error
/// propagates.
pub fn run_pipeline(config: &RunConfig) -> Result<PipelineOutcome, CliError> {
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir).map_err(|e| {
        CliError::Config(format!(
            "cannot create output dir {}: {e}",
            config.output_dir.display()
        ))
    })?;
    let report = load_corpus(config)?;
    for diagnostic in &report.diagnostics {
        eprintln!("diagnostic: {diagnostic}");
    }

    let mut outputs = Vec::new();
    let mut flag_lines = Vec::new();
    let mut result = Ok(());
    for discipline in config.selected_disciplines() {
        result = run_discipline(
            config,
            &report,
            discipline,
            &config.output_dir,
            &mut outputs,
            &mut flag_lines,
        );
        if result.is_err() {
            break;
        }
    }

    let status = if result.is_ok() {
        "complete"
    } else {
        "incomplete"
    };
    write_manifest(&config.output_dir, config, status, &mut outputs)?;
    result?;

    Ok(PipelineOutcome {
        manifest_path: config.output_dir.join("manifest.json"),
        outputs,
        flags: flag_lines,
    })
}
