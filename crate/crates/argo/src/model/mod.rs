//! The nowcasting model: rolling-window design construction, weekly
//! cross-validated refits, and the leakage-safe retrospective runner.

pub mod benchmarks;
pub mod hmm;

use crate::rng;
use crate::series::{PanelScale, SearchPanel, SeriesError, WeeklySeries};
use crate::solver::{
    self, cross_validate, CvTable, DesignMatrix, FitResult, GridConfig, Group, PenaltyRegime,
    PenaltySpec, SolverError,
};
use crate::transform::{self, TransformError, TransformParams};
use crate::vintage::VintageSeries;
use crate::week::{EpiWeek, WeekId};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Model configuration: lag depth, training-window length, penalty regime,
/// transform parameters, and the cross-validation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    /// Number of autoregressive lags (N).
    pub n_lags: usize,
    /// Training-window length in weeks.
    pub window: usize,
    pub regime: PenaltyRegime,
    pub transform: TransformParams,
    pub grid: GridConfig,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            n_lags: 52,
            window: 104,
            regime: PenaltyRegime::SameL1,
            transform: TransformParams::default(),
            grid: GridConfig::default(),
        }
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.window <= self.n_lags {
            return Err(ModelError::InvalidSpec(format!(
                "window ({}) must exceed the lag count ({})",
                self.window, self.n_lags
            )));
        }
        if self.window < 2 {
            return Err(ModelError::InvalidSpec("window must be at least 2".into()));
        }
        self.transform.validate()?;
        Ok(())
    }

    /// The same specification with the lag block removed (search-only model).
    pub fn without_lags(&self) -> ModelSpec {
        ModelSpec { n_lags: 0, ..self.clone() }
    }
}

/// Which surveillance values feed each weekly refit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VintageMode {
    /// Finalized series truncated at the week before estimation.
    Finalized,
    /// Exactly the values published by each estimation week.
    AsPublished,
}

impl std::fmt::Display for VintageMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VintageMode::Finalized => write!(f, "finalized"),
            VintageMode::AsPublished => write!(f, "as-published"),
        }
    }
}

impl std::str::FromStr for VintageMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "finalized" => Ok(VintageMode::Finalized),
            "as-published" => Ok(VintageMode::AsPublished),
            other => Err(format!(
                "unknown vintage mode `{other}` (expected finalized or as-published)"
            )),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
    #[error("insufficient history before {week}: need {need} weeks, have {have}")]
    InsufficientHistory { week: WeekId, need: usize, have: usize },
    #[error("week {0} is not covered by the input")]
    NotCovered(WeekId),
    #[error("misaligned inputs: {0}")]
    Misaligned(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("covariance matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("empty estimation range")]
    EmptyRange,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Builds the rolling-window training design for estimating week `t`.
///
/// `y` is the logit-scale history ending exactly at the week before `t`;
/// `panel` is the log-scale search panel covering the window and `t`.
/// Row `s` (one per window week) has response `y_s`, lag block
/// `y_{s-1}, ..., y_{s-N}`, and the panel row of week `s`; columns are the
/// lags in ascending lag order followed by the terms in panel order.
pub fn build_training_design(
    y: &WeeklySeries,
    panel: &SearchPanel,
    t: WeekId,
    spec: &ModelSpec,
) -> Result<DesignMatrix, ModelError> {
    spec.validate()?;
    let pos_t = panel.position_of(t).ok_or(ModelError::NotCovered(t))?;
    if pos_t == 0 {
        return Err(ModelError::InsufficientHistory { week: t, need: spec.window, have: 0 });
    }
    if y.end() != panel.weeks()[pos_t - 1].id() {
        return Err(ModelError::Misaligned(format!(
            "history ends at {} but the week before {} is {}",
            y.end(),
            t,
            panel.weeks()[pos_t - 1].id()
        )));
    }
    let need = spec.window + spec.n_lags;
    if y.len() < need {
        return Err(ModelError::InsufficientHistory { week: t, need, have: y.len() });
    }
    if pos_t < spec.window {
        return Err(ModelError::InsufficientHistory { week: t, need: spec.window, have: pos_t });
    }

    let n = spec.window;
    let yv = y.values();
    let first_row = y.len() - n; // position of week t - window
    // the panel rows march in lockstep with the y positions
    let panel_offset = pos_t - y.len();
    debug_assert_eq!(
        y.weeks()[first_row].id(),
        panel.weeks()[first_row + panel_offset].id()
    );

    let k = panel.n_terms();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(spec.n_lags + k);
    let mut groups: Vec<Group> = Vec::with_capacity(spec.n_lags + k);
    for lag in 1..=spec.n_lags {
        columns.push((0..n).map(|r| yv[first_row + r - lag]).collect());
        groups.push(Group::Lag);
    }
    for j in 0..k {
        columns.push((0..n).map(|r| panel.row(first_row + r + panel_offset)[j]).collect());
        groups.push(Group::Exo);
    }
    let response: Vec<f64> = (0..n).map(|r| yv[first_row + r]).collect();
    Ok(DesignMatrix::from_columns(columns, groups, response)?)
}

/// One weekly refit: cross-validated penalties plus the final fit.
#[derive(Debug, Clone, PartialEq)]
pub struct WeekFit {
    pub fit: FitResult,
    pub resolved: PenaltySpec,
    pub cv: CvTable,
}

/// Cross-validates the regime's free hyperparameters on the window ending
/// before `t`, then fits at the winning grid point (warm-started down the
/// grid path). Deterministic for a fixed seed.
pub fn fit_week(
    y: &WeeklySeries,
    panel: &SearchPanel,
    t: WeekId,
    spec: &ModelSpec,
    seed: u64,
) -> Result<WeekFit, ModelError> {
    let design = build_training_design(y, panel, t, spec)?;
    let (resolved, cv) = cross_validate(&design, spec.regime, &spec.grid, seed)?;
    let path = cv.path_to_selected();
    let fit = solver::fit_path(&design, &path)?;
    Ok(WeekFit { fit, resolved, cv })
}

/// One-step nowcast: `inverse_logit(mu + alpha' y_lags + beta' x_t)`.
///
/// `y_lags` is ordered most recent first (`y_{t-1}, ..., y_{t-N}`), matching
/// the design's lag columns; `x_t` is the log-scale panel row at `t`.
pub fn nowcast(fit: &FitResult, y_lags: &[f64], x_t: &[f64]) -> Result<f64, ModelError> {
    let expected = fit.coefficients.len();
    let got = y_lags.len() + x_t.len();
    if got != expected {
        return Err(ModelError::DimensionMismatch { expected, got });
    }
    let mut z = fit.intercept;
    for (c, v) in fit.coefficients[..y_lags.len()].iter().zip(y_lags) {
        z += c * v;
    }
    for (c, v) in fit.coefficients[y_lags.len()..].iter().zip(x_t) {
        z += c * v;
    }
    Ok(transform::inverse_logit(z))
}

/// One estimated week of a retrospective run.
#[derive(Debug, Clone, PartialEq)]
pub struct NowcastWeek {
    pub week: EpiWeek,
    /// Point estimate as a proportion in (0, 1).
    pub estimate: f64,
    pub fit: FitResult,
    pub resolved: PenaltySpec,
    pub cv: CvTable,
    /// Training weeks whose value fell back to the finalized series
    /// because no revision archive exists (as-published mode only).
    pub finalized_fallback_in_window: usize,
}

/// A full retrospective run: per-week estimates with the fits that
/// produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct NowcastSeries {
    pub entries: Vec<NowcastWeek>,
    pub mode: VintageMode,
    pub seed: u64,
    /// Lag count the fits were built with (the coefficient block split).
    pub n_lags: usize,
}

impl NowcastSeries {
    /// Percent-scale estimates, one per entry.
    pub fn estimates_percent(&self, params: &TransformParams) -> Vec<(EpiWeek, f64)> {
        self.entries
            .iter()
            .map(|e| (e.week, e.estimate * params.percent_divisor))
            .collect()
    }
}

/// Per-week coefficient matrix for the trajectory export: each row holds
/// the intercept, the N lag coefficients, then the K term coefficients,
/// plus the active-coefficient count.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTrajectory {
    pub weeks: Vec<EpiWeek>,
    pub active_counts: Vec<usize>,
    pub intercepts: Vec<f64>,
    /// One row per week: N lag coefficients then K term coefficients.
    pub rows: Vec<Vec<f64>>,
    pub n_lags: usize,
}

/// Extracts the weekly coefficient trajectory from a retrospective run.
pub fn coefficient_trajectory(series: &NowcastSeries) -> CoefficientTrajectory {
    CoefficientTrajectory {
        weeks: series.entries.iter().map(|e| e.week).collect(),
        active_counts: series.entries.iter().map(|e| e.fit.active_set_size).collect(),
        intercepts: series.entries.iter().map(|e| e.fit.intercept).collect(),
        rows: series.entries.iter().map(|e| e.fit.coefficients.clone()).collect(),
        n_lags: series.n_lags,
    }
}

/// The surveillance history visible at week `t` under the given mode,
/// together with the weeks whose value fell back to the finalized series.
pub fn visible_history(
    vintage: &VintageSeries,
    t: WeekId,
    mode: VintageMode,
) -> Result<(WeeklySeries, Vec<WeekId>), ModelError> {
    match mode {
        VintageMode::Finalized => {
            let series = vintage
                .finalized()
                .truncate_before(t)
                .map_err(|_| ModelError::InsufficientHistory { week: t, need: 1, have: 0 })?;
            Ok((series, Vec::new()))
        }
        VintageMode::AsPublished => {
            let view = vintage.as_of(t).ok_or(ModelError::InsufficientHistory {
                week: t,
                need: 1,
                have: 0,
            })?;
            Ok((view.series, view.finalized_fallback))
        }
    }
}

/// Weeks of the finalized axis inside the inclusive range.
pub fn weeks_in_range(
    vintage: &VintageSeries,
    range: (WeekId, WeekId),
) -> Result<Vec<EpiWeek>, ModelError> {
    let weeks: Vec<EpiWeek> = vintage
        .finalized()
        .weeks()
        .iter()
        .filter(|w| w.id() >= range.0 && w.id() <= range.1)
        .copied()
        .collect();
    if weeks.is_empty() {
        return Err(ModelError::EmptyRange);
    }
    Ok(weeks)
}

/// Runs the model retrospectively over `range`, refitting every week on
/// data visible at that week. Weeks are fit in parallel; output order and
/// every number are identical to a sequential run for a fixed seed.
pub fn run_retrospective(
    vintage: &VintageSeries,
    panel: &SearchPanel,
    range: (WeekId, WeekId),
    spec: &ModelSpec,
    mode: VintageMode,
    seed: u64,
) -> Result<NowcastSeries, ModelError> {
    spec.validate()?;
    let panel_log = match panel.scale() {
        PanelScale::Raw => transform::log_panel(panel, &spec.transform)?,
        PanelScale::Log => panel.clone(),
    };
    let weeks = weeks_in_range(vintage, range)?;

    let entries: Vec<NowcastWeek> = weeks
        .par_iter()
        .map(|&week| -> Result<NowcastWeek, ModelError> {
            let t = week.id();
            let (visible, fallback) = visible_history(vintage, t, mode)?;
            let y = transform::logit_series(&visible, &spec.transform)?;
            let week_seed = rng::substream(seed, rng::week_index(t.year, t.week));
            let wf = fit_week(&y, &panel_log, t, spec, week_seed)?;
            let yv = y.values();
            let lags: Vec<f64> =
                (1..=spec.n_lags).map(|j| yv[yv.len() - j]).collect();
            let x_t = panel_log.row_for(t).ok_or(ModelError::NotCovered(t))?;
            let estimate = nowcast(&wf.fit, &lags, x_t)?;
            // count only the fallback weeks the training window touched
            let reach = spec.window + spec.n_lags;
            let window_start = y.weeks()[y.len() - reach.min(y.len())].id();
            let fallback_in_window =
                fallback.iter().filter(|id| **id >= window_start).count();
            Ok(NowcastWeek {
                week,
                estimate,
                fit: wf.fit,
                resolved: wf.resolved,
                cv: wf.cv,
                finalized_fallback_in_window: fallback_in_window,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(NowcastSeries { entries, mode, seed, n_lags: spec.n_lags })
}
