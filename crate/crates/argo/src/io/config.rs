//! Run configuration: a TOML file with input paths, model settings, the
//! evaluation range, named periods, and bootstrap settings. Every numeric
//! default is overridable; the seed is mandatory so runs never depend on
//! the clock.

use crate::eval::Period;
use crate::model::{ModelSpec, VintageMode};
use crate::solver::{FoldStrategy, GridConfig, PenaltyRegime};
use crate::transform::TransformParams;
use crate::week::EpiWeek;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("referenced file does not exist: {0}")]
    MissingFile(PathBuf),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("unknown period preset `{0}`")]
    UnknownPreset(String),
    #[error("period `{name}` matches no weeks in the data ({from} .. {to})")]
    EmptyPeriod { name: String, from: String, to: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelInput {
    pub path: PathBuf,
    pub source: crate::series::PanelSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// Finalized surveillance series.
    pub ili: PathBuf,
    /// Revision triangle; omitted means no revisions.
    #[serde(default)]
    pub revisions: Option<PathBuf>,
    /// External estimate series for the external-signal benchmark.
    #[serde(default)]
    pub gft: Option<PathBuf>,
    /// Panels concatenated in listed order.
    pub panels: Vec<PanelInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub n_lags: usize,
    pub window: usize,
    pub regime: PenaltyRegime,
    pub delta: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection { n_lags: 52, window: 104, regime: PenaltyRegime::SameL1, delta: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSection {
    pub folds: usize,
    pub points_1d: usize,
    pub points_2d: usize,
    pub decades: f64,
    pub strategy: FoldStrategy,
}

impl Default for CvSection {
    fn default() -> Self {
        let g = GridConfig::default();
        CvSection {
            folds: g.folds,
            points_1d: g.points_1d,
            points_2d: g.points_2d,
            decades: g.decades,
            strategy: g.strategy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Week end-date bounds of the evaluation range (inclusive). Omitted
    /// bounds default to the maximal feasible range.
    pub start_date: Option<String>,
    pub end_date: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodSpec {
    pub name: String,
    /// Inclusive week end-date bounds.
    pub start_date: String,
    pub end_date: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapSection {
    pub replicates: usize,
    pub mean_block_length: f64,
    pub level: f64,
}

impl Default for BootstrapSection {
    fn default() -> Self {
        BootstrapSection { replicates: 10_000, mean_block_length: 52.0, level: 0.95 }
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("argo-out")
}

/// The full run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default = "VintageMode::default_finalized")]
    pub vintage_mode: VintageMode,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    pub inputs: Inputs,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub cv: CvSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub periods: Vec<PeriodSpec>,
    /// Names from [`period_presets`] to include.
    #[serde(default)]
    pub period_presets: Vec<String>,
    #[serde(default)]
    pub bootstrap: BootstrapSection,
}

impl VintageMode {
    fn default_finalized() -> Self {
        VintageMode::Finalized
    }
}

impl RunConfig {
    /// Parses the TOML file, resolving relative input paths against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        cfg.inputs.ili = resolve(base, &cfg.inputs.ili);
        cfg.inputs.revisions = cfg.inputs.revisions.map(|p| resolve(base, &p));
        cfg.inputs.gft = cfg.inputs.gft.map(|p| resolve(base, &p));
        for p in &mut cfg.inputs.panels {
            p.path = resolve(base, &p.path);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.inputs.panels.is_empty() {
            return Err(ConfigError::Invalid("at least one panel input is required".into()));
        }
        for path in self.input_paths() {
            if !path.exists() {
                return Err(ConfigError::MissingFile(path));
            }
        }
        if !(0.0 < self.bootstrap.level && self.bootstrap.level < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "bootstrap level must be in (0,1), got {}",
                self.bootstrap.level
            )));
        }
        if self.bootstrap.mean_block_length < 1.0 {
            return Err(ConfigError::Invalid("mean_block_length must be at least 1".into()));
        }
        if self.model.window <= self.model.n_lags {
            return Err(ConfigError::Invalid(format!(
                "window ({}) must exceed n_lags ({})",
                self.model.window, self.model.n_lags
            )));
        }
        parse_date_opt(&self.run.start_date)?;
        parse_date_opt(&self.run.end_date)?;
        for p in &self.periods {
            parse_date(&p.start_date)?;
            parse_date(&p.end_date)?;
        }
        for name in &self.period_presets {
            if !period_presets().iter().any(|(n, _, _)| n == name) {
                return Err(ConfigError::UnknownPreset(name.clone()));
            }
        }
        Ok(())
    }

    pub fn input_paths(&self) -> Vec<PathBuf> {
        let mut out = vec![self.inputs.ili.clone()];
        out.extend(self.inputs.revisions.clone());
        out.extend(self.inputs.gft.clone());
        out.extend(self.inputs.panels.iter().map(|p| p.path.clone()));
        out
    }

    pub fn model_spec(&self) -> ModelSpec {
        ModelSpec {
            n_lags: self.model.n_lags,
            window: self.model.window,
            regime: self.model.regime,
            transform: TransformParams { delta: self.model.delta, percent_divisor: 100.0 },
            grid: GridConfig {
                points_1d: self.cv.points_1d,
                points_2d: self.cv.points_2d,
                decades: self.cv.decades,
                folds: self.cv.folds,
                strategy: self.cv.strategy,
            },
        }
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn parse_date(s: &str) -> Result<chrono::NaiveDate, ConfigError> {
    s.parse()
        .map_err(|_| ConfigError::Invalid(format!("cannot parse date `{s}` (expected YYYY-MM-DD)")))
}

fn parse_date_opt(s: &Option<String>) -> Result<Option<chrono::NaiveDate>, ConfigError> {
    s.as_ref().map(|s| parse_date(s)).transpose()
}

/// Named period presets: regular seasons run week 40 through week 20 of
/// the next year. Bounds are inclusive week end dates.
pub fn period_presets() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("whole-period", "2009-04-04", "2015-07-18"),
        ("h1n1", "2009-04-04", "2010-01-02"),
        ("season-2010-11", "2010-10-09", "2011-05-28"),
        ("season-2011-12", "2011-10-08", "2012-05-26"),
        ("season-2012-13", "2012-10-06", "2013-05-25"),
        ("season-2013-14", "2013-10-05", "2014-05-24"),
        ("season-2014-15", "2014-10-04", "2015-05-23"),
    ]
}

/// Resolves the configured periods against the evaluation axis. With no
/// periods configured, the whole range becomes the single period.
pub fn resolve_periods(cfg: &RunConfig, weeks: &[EpiWeek]) -> Result<Vec<Period>, ConfigError> {
    let mut specs: Vec<(String, chrono::NaiveDate, chrono::NaiveDate)> = Vec::new();
    for p in &cfg.periods {
        specs.push((p.name.clone(), parse_date(&p.start_date)?, parse_date(&p.end_date)?));
    }
    for name in &cfg.period_presets {
        let (n, from, to) = period_presets()
            .into_iter()
            .find(|(n, _, _)| n == name)
            .ok_or_else(|| ConfigError::UnknownPreset(name.clone()))?;
        specs.push((n.to_string(), parse_date(from)?, parse_date(to)?));
    }
    if specs.is_empty() {
        let start = *weeks.first().expect("non-empty axis");
        let end = *weeks.last().expect("non-empty axis");
        return Ok(vec![Period::new("whole-range", start, end)
            .expect("axis ordering guarantees start <= end")]);
    }
    let mut out = Vec::with_capacity(specs.len());
    for (name, from, to) in specs {
        let inside: Vec<EpiWeek> =
            weeks.iter().filter(|w| w.end_date >= from && w.end_date <= to).copied().collect();
        match (inside.first().copied(), inside.last().copied()) {
            (Some(s), Some(e)) => out.push(Period::new(&name, s, e).map_err(|e| {
                ConfigError::Invalid(format!("period `{name}` is malformed: {e}"))
            })?),
            _ => {
                return Err(ConfigError::EmptyPeriod {
                    name,
                    from: from.to_string(),
                    to: to.to_string(),
                })
            }
        }
    }
    Ok(out)
}

/// Parses a synthetic-generator spec from TOML.
pub fn load_synthetic_spec(path: &Path) -> Result<super::synth::SyntheticSpec, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    toml::from_str(&text)
        .map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })
}
