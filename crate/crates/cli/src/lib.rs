//! `citemap` command line: ingest-check, indicators, histogram, gain,
//! lotka, map, pipeline and synth. Exit status is 0 on success, 1 on data
//! errors, 2 on config errors.

pub mod config;
pub mod manifest;
pub mod pipeline;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use citemap::heliomap::{
    flag_outliers, layout_map, render_svg, HelioConfig, OutlierConfig, SvgStyle,
};
use citemap::histogram::{build_histogram, BinningSpec};
use citemap::indicators::{
    compute_indicators_with, indicators_table, publisher_stats, IndicatorConfig, IndicatorSet,
    Scope, StdDevMode,
};
use citemap::infogain::{rank_by_gain, ranking_table};
use citemap::ingest::IngestReport;
use citemap::lotka::{fit_lotka_with, fit_report, FitMethod, FitOptions};
use citemap::record::Discipline;
use citemap::synth::{generate, SynthSpec};

use config::{FileFormat, GainOptions, LogBase, RunConfig, SmoothingOpt};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "citemap",
    version,
    about = "Citation-pattern analysis: indicators, histograms, information gain, Lotka tails and radial publisher maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Record file (see README for the column layout)
    #[arg(long)]
    pub records: PathBuf,
    /// Two-column alias table raw_name,canonical_name
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Two-column category map category,codes (codes semicolon-separated)
    #[arg(long)]
    pub categories: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: FileFormat,
}

#[derive(Debug, Clone, Args)]
pub struct BinningArgs {
    #[arg(long, default_value_t = 1)]
    pub bin_width: u64,
    #[arg(long)]
    pub max_bin: Option<u64>,
    #[arg(long)]
    pub include_overflow: bool,
}

impl BinningArgs {
    fn to_spec(&self) -> BinningSpec {
        BinningSpec {
            bin_width: self.bin_width,
            max_bin: self.max_bin,
            include_overflow: self.include_overflow,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GroupBy {
    Year,
    Publisher,
    Discipline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StdDevOpt {
    Population,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FitMethodOpt {
    LeastSquares,
    Mle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate inputs, reporting per-row diagnostics
    IngestCheck {
        #[command(flatten)]
        inputs: InputArgs,
        /// Print a simple groupby table instead of the summary
        #[arg(long, value_enum)]
        group_by: Option<GroupBy>,
        /// Exit nonzero when any diagnostic was raised
        #[arg(long)]
        strict: bool,
    },
    /// Indicator sets per scope, as JSON objects and a scope-by-indicator table
    Indicators {
        #[command(flatten)]
        inputs: InputArgs,
        /// Scopes: ALL or discipline codes; default is ALL plus every
        /// nonempty discipline
        #[arg(long = "discipline")]
        disciplines: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "population")]
        stddev: StdDevOpt,
        #[arg(long, default_value_t = 20)]
        top_k: usize,
    },
    /// Citation histogram of a scope (or one publisher within it)
    Histogram {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long)]
        discipline: String,
        #[arg(long)]
        publisher: Option<String>,
        #[command(flatten)]
        binning: BinningArgs,
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank the top publishers of a discipline by information gain
    Gain {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long)]
        discipline: String,
        #[arg(long, default_value_t = 20)]
        top_k: usize,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, value_enum, default_value_t)]
        log_base: LogBase,
        #[arg(long, value_enum, default_value_t)]
        smoothing: SmoothingOpt,
        #[command(flatten)]
        binning: BinningArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the power-law tail of a scope's histogram
    Lotka {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long)]
        discipline: String,
        #[arg(long, value_enum, default_value = "least-squares")]
        method: FitMethodOpt,
        #[arg(long, default_value_t = 1)]
        min_count: u64,
        #[command(flatten)]
        binning: BinningArgs,
        /// Output file for the fit + report JSON; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lay out and render the radial publisher map of a discipline
    Map {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long)]
        discipline: String,
        #[arg(long, default_value_t = 20)]
        top_k: usize,
        /// Publishers to leave out of the map (exclusion is never automatic)
        #[arg(long)]
        exclude: Vec<String>,
        #[arg(long, default_value_t = 60.0)]
        r_min: f64,
        #[arg(long, default_value_t = 240.0)]
        r_max: f64,
        #[command(flatten)]
        binning: BinningArgs,
        #[arg(long)]
        out_layout: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
    },
    /// Full run: everything above per discipline, plus a digest manifest
    Pipeline {
        /// JSON run config; flags below override it
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        aliases: Option<PathBuf>,
        #[arg(long)]
        categories: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FileFormat>,
        #[arg(long = "discipline")]
        disciplines: Vec<String>,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long)]
        exclude: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic record file from a JSON spec
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the spec's seed
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn parse_scope(code: &str) -> Result<Scope, CliError> {
    if code.trim().eq_ignore_ascii_case("all") {
        return Ok(Scope::All);
    }
    code.parse::<Discipline>()
        .map(Scope::Discipline)
        .map_err(|e| CliError::Config(e.to_string()))
}

fn load_inputs(
    args: &InputArgs,
    binning: BinningSpec,
) -> Result<(RunConfig, IngestReport), CliError> {
    let config = RunConfig {
        records: args.records.clone(),
        aliases: args.aliases.clone(),
        categories: args.categories.clone(),
        format: args.format,
        binning,
        ..Default::default()
    };
    config.validate()?;
    let report = pipeline::load_corpus(&config)?;
    Ok((config, report))
}

fn write_or_print(out: Option<&PathBuf>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, contents)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::Data(format!("stdout: {e}"))),
    }
}

fn scope_citations(report: &IngestReport, scope: Scope) -> Vec<u64> {
    report
        .records
        .iter()
        .filter(|r| match scope {
            Scope::All => true,
            Scope::Discipline(d) => r.in_discipline(d),
        })
        .map(|r| r.citations)
        .collect()
}

fn cmd_ingest_check(
    inputs: &InputArgs,
    group_by: Option<GroupBy>,
    strict: bool,
) -> Result<(), CliError> {
    let (_, report) = load_inputs(inputs, BinningSpec::default())?;
    for d in &report.diagnostics {
        eprintln!("diagnostic: {d}");
    }
    if let Some(group_by) = group_by {
        let mut counts: BTreeMap<String, (u64, u64)> = BTreeMap::new();
        for r in &report.records {
            let keys: Vec<String> = match group_by {
                GroupBy::Year => vec![r.year.to_string()],
                GroupBy::Publisher => vec![r.publisher.clone()],
                GroupBy::Discipline => {
                    if r.is_unmapped() {
                        vec!["Unmapped".to_string()]
                    } else {
                        r.disciplines.iter().map(|d| d.code().to_string()).collect()
                    }
                }
            };
            for key in keys {
                let entry = counts.entry(key).or_insert((0, 0));
                entry.0 += 1;
                entry.1 += r.citations;
            }
        }
        println!("key,nr_bc,total_citations");
        for (key, (nr, cites)) in counts {
            println!("{key},{nr},{cites}");
        }
    } else {
        println!("records: {}", report.records.len());
        println!("diagnostics: {}", report.diagnostics.len());
        println!("unmapped records: {}", report.unmapped);
        println!("publishers without alias entry: {}", report.unaliased.len());
    }
    if strict && !report.diagnostics.is_empty() {
        return Err(CliError::Data(format!(
            "{} diagnostics raised under --strict",
            report.diagnostics.len()
        )));
    }
    Ok(())
}

fn cmd_indicators(
    inputs: &InputArgs,
    disciplines: &[String],
    out: &PathBuf,
    stddev: StdDevOpt,
    top_k: usize,
) -> Result<(), CliError> {
    let (_, report) = load_inputs(inputs, BinningSpec::default())?;
    let scopes: Vec<Scope> = if disciplines.is_empty() {
        let mut scopes = vec![Scope::All];
        for d in Discipline::ALL {
            if report.records.iter().any(|r| r.in_discipline(d)) {
                scopes.push(Scope::Discipline(d));
            }
        }
        scopes
    } else {
        disciplines
            .iter()
            .map(|c| parse_scope(c))
            .collect::<Result<_, _>>()?
    };
    let indicator_config = IndicatorConfig {
        stddev: match stddev {
            StdDevOpt::Population => StdDevMode::Population,
            StdDevOpt::Sample => StdDevMode::Sample,
        },
        top_k,
    };
    let mut sets: Vec<IndicatorSet> = Vec::new();
    for scope in scopes {
        sets.push(
            compute_indicators_with(&report.records, scope, &indicator_config)
                .map_err(|e| CliError::Data(e.to_string()))?,
        );
    }
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
    let mut json =
        serde_json::to_string_pretty(&sets).map_err(|e| CliError::Data(e.to_string()))?;
    json.push('\n');
    std::fs::write(out.join("indicators.json"), json).map_err(|e| CliError::Data(e.to_string()))?;
    std::fs::write(out.join("indicators_table.csv"), indicators_table(&sets))
        .map_err(|e| CliError::Data(e.to_string()))?;
    println!("wrote {}", out.join("indicators.json").display());
    println!("wrote {}", out.join("indicators_table.csv").display());
    Ok(())
}

fn cmd_histogram(
    inputs: &InputArgs,
    discipline: &str,
    publisher: Option<&String>,
    binning: &BinningArgs,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let (config, report) = load_inputs(inputs, binning.to_spec())?;
    let scope = parse_scope(discipline)?;
    let citations: Vec<u64> = match publisher {
        Some(name) => report
            .records
            .iter()
            .filter(|r| match scope {
                Scope::All => true,
                Scope::Discipline(d) => r.in_discipline(d),
            })
            .filter(|r| &r.publisher == name)
            .map(|r| r.citations)
            .collect(),
        None => scope_citations(&report, scope),
    };
    let label = match publisher {
        Some(name) => format!("{}:{name}", scope.label()),
        None => scope.label(),
    };
    let hist = build_histogram(&citations, &config.binning, label)
        .map_err(|e| CliError::Data(e.to_string()))?;
    write_or_print(out, &hist.to_delimited())
}

fn cmd_gain(
    inputs: &InputArgs,
    discipline: &str,
    top_k: usize,
    gain: &GainOptions,
    binning: &BinningArgs,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    if top_k == 0 {
        return Err(CliError::Config("top_k must be at least 1".to_string()));
    }
    let (config, report) = load_inputs(inputs, binning.to_spec())?;
    let scope = parse_scope(discipline)?;
    let citations = scope_citations(&report, scope);
    let reference = build_histogram(&citations, &config.binning, scope.label())
        .map_err(|e| CliError::Data(e.to_string()))?;
    let stats = publisher_stats(&report.records, scope, &config.binning)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let inputs_for_rank: Vec<(String, citemap::histogram::CitationHistogram)> = stats
        .iter()
        .take(top_k)
        .map(|s| (s.publisher.clone(), s.histogram.clone()))
        .collect();
    let (results, failures) = rank_by_gain(
        &reference,
        &inputs_for_rank,
        gain.effective_scale(),
        gain.smoothing.to_policy(),
    );
    for (label, error) in &failures {
        eprintln!("warning: gain for '{label}' failed: {error}");
    }
    write_or_print(out, &ranking_table(&results, &stats, &BTreeSet::new()))
}

fn cmd_lotka(
    inputs: &InputArgs,
    discipline: &str,
    method: FitMethodOpt,
    min_count: u64,
    binning: &BinningArgs,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let (config, report) = load_inputs(inputs, binning.to_spec())?;
    let scope = parse_scope(discipline)?;
    let citations = scope_citations(&report, scope);
    let hist = build_histogram(&citations, &config.binning, scope.label())
        .map_err(|e| CliError::Data(e.to_string()))?;
    let options = FitOptions {
        method: match method {
            FitMethodOpt::LeastSquares => FitMethod::LogLogLeastSquares,
            FitMethodOpt::Mle => FitMethod::MaximumLikelihood,
        },
        min_count,
    };
    let fit = fit_lotka_with(&hist, &options).map_err(|e| CliError::Data(e.to_string()))?;
    let rows = fit_report(&hist, &fit);
    #[derive(serde::Serialize)]
    struct Artifact {
        fit: citemap::lotka::LotkaFit,
        report: Vec<citemap::lotka::FitReportRow>,
    }
    let mut text = serde_json::to_string_pretty(&Artifact { fit, report: rows })
        .map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    write_or_print(out, &text)
}

#[allow(clippy::too_many_arguments)]
fn cmd_map(
    inputs: &InputArgs,
    discipline: &str,
    top_k: usize,
    exclude: &[String],
    r_min: f64,
    r_max: f64,
    binning: &BinningArgs,
    out_layout: Option<&PathBuf>,
    out_svg: Option<&PathBuf>,
) -> Result<(), CliError> {
    let (config, report) = load_inputs(inputs, binning.to_spec())?;
    let scope = parse_scope(discipline)?;
    let citations = scope_citations(&report, scope);
    let reference = build_histogram(&citations, &config.binning, scope.label())
        .map_err(|e| CliError::Data(e.to_string()))?;
    let stats = publisher_stats(&report.records, scope, &config.binning)
        .map_err(|e| CliError::Data(e.to_string()))?;

    let exclude: BTreeSet<String> = exclude.iter().cloned().collect();
    let mut labels = BTreeSet::new();
    let mut gain_inputs = Vec::new();
    for s in stats.iter().take(top_k).chain(
        stats
            .iter()
            .filter(|s| !exclude.contains(&s.publisher))
            .take(top_k),
    ) {
        if labels.insert(s.publisher.clone()) {
            gain_inputs.push((s.publisher.clone(), s.histogram.clone()));
        }
    }
    let (gains, failures) = rank_by_gain(
        &reference,
        &gain_inputs,
        1.0,
        SmoothingOpt::Additive.to_policy(),
    );
    for (label, error) in &failures {
        eprintln!("warning: gain for '{label}' failed: {error}");
    }

    let scoped: Vec<citemap::record::CitationRecord> = report
        .records
        .iter()
        .filter(|r| match scope {
            Scope::All => true,
            Scope::Discipline(d) => r.in_discipline(d),
        })
        .cloned()
        .collect();
    let flags = flag_outliers(
        &reference,
        &stats,
        &gains,
        &scoped,
        &OutlierConfig::default(),
    );
    let mut flagged = BTreeSet::new();
    for flag in &flags {
        flagged.insert(flag.label.clone());
        println!("outlier flag: {} ({:?})", flag.label, flag.reasons);
    }

    let helio_config = HelioConfig {
        k: top_k,
        r_min,
        r_max,
        exclude,
        flagged,
        ..Default::default()
    };
    let layout = layout_map(&reference, &stats, &gains, &helio_config)
        .map_err(|e| CliError::Data(e.to_string()))?;
    if out_layout.is_some() {
        let mut text =
            serde_json::to_string_pretty(&layout).map_err(|e| CliError::Data(e.to_string()))?;
        text.push('\n');
        write_or_print(out_layout, &text)?;
    }
    let svg =
        render_svg(&layout, &SvgStyle::default()).map_err(|e| CliError::Data(e.to_string()))?;
    match out_svg {
        Some(_) => write_or_print(out_svg, &svg),
        None if out_layout.is_none() => write_or_print(None, &svg),
        None => Ok(()),
    }
}

struct PipelineOverrides<'a> {
    records: Option<PathBuf>,
    aliases: Option<PathBuf>,
    categories: Option<PathBuf>,
    format: Option<FileFormat>,
    disciplines: &'a [String],
    top_k: Option<usize>,
    exclude: &'a [String],
    out: Option<PathBuf>,
}

fn cmd_pipeline(
    config_path: Option<&PathBuf>,
    overrides: PipelineOverrides<'_>,
) -> Result<(), CliError> {
    let mut config = match config_path {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(records) = overrides.records {
        config.records = records;
    }
    if let Some(aliases) = overrides.aliases {
        config.aliases = Some(aliases);
    }
    if let Some(categories) = overrides.categories {
        config.categories = categories;
    }
    if let Some(format) = overrides.format {
        config.format = format;
    }
    if !overrides.disciplines.is_empty() {
        config.disciplines = overrides.disciplines.to_vec();
    }
    if let Some(top_k) = overrides.top_k {
        config.top_k = top_k;
    }
    for label in overrides.exclude {
        config.map.exclude.insert(label.clone());
    }
    if let Some(out) = overrides.out {
        config.output_dir = out;
    }
    let outcome = pipeline::run_pipeline(&config)?;
    println!("wrote {}", outcome.manifest_path.display());
    println!("artifacts: {}", outcome.outputs.len());
    Ok(())
}

fn cmd_synth(spec_path: &PathBuf, out: &PathBuf, seed: Option<u64>) -> Result<(), CliError> {
    if !spec_path.exists() {
        return Err(CliError::Config(format!(
            "spec file {} does not exist",
            spec_path.display()
        )));
    }
    let mut spec = SynthSpec::from_path(spec_path)
        .map_err(|e| CliError::Config(format!("spec {}: {e}", spec_path.display())))?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let records = generate(&spec).map_err(|e| CliError::Data(e.to_string()))?;
    let file = std::fs::File::create(out)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", out.display())))?;
    citemap::ingest::write_records(file, &records).map_err(|e| CliError::Data(e.to_string()))?;
    println!("wrote {} records to {}", records.len(), out.display());
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::IngestCheck {
            inputs,
            group_by,
            strict,
        } => cmd_ingest_check(inputs, *group_by, *strict),
        Command::Indicators {
            inputs,
            disciplines,
            out,
            stddev,
            top_k,
        } => cmd_indicators(inputs, disciplines, out, *stddev, *top_k),
        Command::Histogram {
            inputs,
            discipline,
            publisher,
            binning,
            out,
        } => cmd_histogram(
            inputs,
            discipline,
            publisher.as_ref(),
            binning,
            out.as_ref(),
        ),
        Command::Gain {
            inputs,
            discipline,
            top_k,
            scale,
            log_base,
            smoothing,
            binning,
            out,
        } => cmd_gain(
            inputs,
            discipline,
            *top_k,
            &GainOptions {
                scale: *scale,
                log_base: *log_base,
                smoothing: *smoothing,
            },
            binning,
            out.as_ref(),
        ),
        Command::Lotka {
            inputs,
            discipline,
            method,
            min_count,
            binning,
            out,
        } => cmd_lotka(
            inputs,
            discipline,
            *method,
            *min_count,
            binning,
            out.as_ref(),
        ),
        Command::Map {
            inputs,
            discipline,
            top_k,
            exclude,
            r_min,
            r_max,
            binning,
            out_layout,
            out_svg,
        } => cmd_map(
            inputs,
            discipline,
            *top_k,
            exclude,
            *r_min,
            *r_max,
            binning,
            out_layout.as_ref(),
            out_svg.as_ref(),
        ),
        Command::Pipeline {
            config,
            records,
            aliases,
            categories,
            format,
            disciplines,
            top_k,
            exclude,
            out,
        } => cmd_pipeline(
            config.as_ref(),
            PipelineOverrides {
                records: records.clone(),
                aliases: aliases.clone(),
                categories: categories.clone(),
                format: *format,
                disciplines,
                top_k: *top_k,
                exclude,
                out: out.clone(),
            },
        ),
        Command::Synth { spec, out, seed } => cmd_synth(spec, out, *seed),
    }
}
