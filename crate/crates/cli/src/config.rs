//! Run configuration: a JSON file plus flag overrides, echoed verbatim into
//! the run manifest so every run is auditable.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use citemap::heliomap::RadiusScale;
use citemap::histogram::BinningSpec;
use citemap::infogain::SmoothingPolicy;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FileFormat {
    pub fn to_record_format(self) -> citemap::ingest::RecordFormat {
        match self {
            FileFormat::Csv => citemap::ingest::RecordFormat::DelimitedText,
            FileFormat::Jsonl => citemap::ingest::RecordFormat::RecordPerLine,
        }
    }
}

/// Display label for the gain unit; bits folds 1/ln2 into the scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingOpt {
    #[default]
    Additive,
    ErrorOut,
    RestrictToCommonSupport,
}

impl SmoothingOpt {
    pub fn to_policy(self) -> SmoothingPolicy {
        match self {
            SmoothingOpt::Additive => SmoothingPolicy::Additive,
            SmoothingOpt::ErrorOut => SmoothingPolicy::ErrorOut,
            SmoothingOpt::RestrictToCommonSupport => SmoothingPolicy::RestrictToCommonSupport,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GainOptions {
    pub scale: f64,
    pub log_base: LogBase,
    pub smoothing: SmoothingOpt,
}

impl Default for GainOptions {
    fn default() -> Self {
        GainOptions {
            scale: 1.0,
            log_base: LogBase::Nats,
            smoothing: SmoothingOpt::Additive,
        }
    }
}

impl GainOptions {
    /// Scale constant actually applied, with the log base folded in.
    pub fn effective_scale(&self) -> f64 {
        match self.log_base {
            LogBase::Nats => self.scale,
            LogBase::Bits => self.scale / std::f64::consts::LN_2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MapOptions {
    pub r_min: f64,
    pub r_max: f64,
    pub area_max: f64,
    pub radius_scale: RadiusScale,
    pub exclude: BTreeSet<String>,
    pub width: u32,
    pub height: u32,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions {
            r_min: 60.0,
            r_max: 240.0,
            area_max: 2400.0,
            radius_scale: RadiusScale::Linear,
            exclude: BTreeSet::new(),
            width: 800,
            height: 800,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub records: PathBuf,
    pub aliases: Option<PathBuf>,
    pub categories: PathBuf,
    pub format: FileFormat,
    /// Discipline codes to process; empty means all four.
    pub disciplines: Vec<String>,
    pub top_k: usize,
    pub gain: GainOptions,
    pub binning: BinningSpec,
    pub map: MapOptions,
    pub output_dir: PathBuf,
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            records: PathBuf::from("records.csv"),
            aliases: None,
            categories: PathBuf::from("categories.csv"),
            format: FileFormat::Csv,
            disciplines: Vec::new(),
            top_k: 20,
            gain: GainOptions::default(),
            binning: BinningSpec::default(),
            map: MapOptions::default(),
            output_dir: PathBuf::from("out"),
            seed: None,
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::Config(format!("cannot open config {}: {e}", path.display())))?;
        serde_json::from_reader(file)
            .map_err(|e| CliError::Config(format!("cannot parse config {}: {e}", path.display())))
    }

    /// Referenced input paths must exist and basic bounds must hold.
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, path) in [
            ("records", Some(self.records.as_path())),
            ("categories", Some(self.categories.as_path())),
            ("aliases", self.aliases.as_deref()),
        ] {
            if let Some(path) = path {
                if !path.exists() {
                    return Err(CliError::Config(format!(
                        "{name} file {} does not exist",
                        path.display()
                    )));
                }
            }
        }
        if self.top_k == 0 {
            return Err(CliError::Config("top_k must be at least 1".to_string()));
        }
        if !self.gain.scale.is_finite() || self.gain.scale < 0.0 {
            return Err(CliError::Config(format!(
                "gain scale must be finite and non-negative, got {}",
                self.gain.scale
            )));
        }
        self.binning
            .validate()
            .map_err(|e| CliError::Config(format!("binning: {e}")))?;
        for code in &self.disciplines {
            code.parse::<citemap::record::Discipline>()
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn selected_disciplines(&self) -> Vec<citemap::record::Discipline> {
        if self.disciplines.is_empty() {
            citemap::record::Discipline::ALL.to_vec()
        } else {
            self.disciplines
                .iter()
                .map(|c| c.parse().expect("validated"))
                .collect()
        }
    }
}
