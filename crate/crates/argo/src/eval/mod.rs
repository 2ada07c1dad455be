//! Accuracy metrics, relative efficiency, and period slicing.
//!
//! All metrics are computed on the original percent scale of the activity
//! level. Error metrics (RMSE, MAE, MAPE) are reported relative to the
//! naive carry-forward method in the comparison table; the raw values stay
//! available alongside.

pub mod bootstrap;
pub mod table;

use crate::week::{EpiWeek, WeekId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("period needs at least {need} points, got {got}")]
    EmptyPeriod { need: usize, got: usize },
    #[error("aligned series have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("MAPE undefined: target value of zero at position {0}")]
    ZeroTarget(usize),
    #[error("correlation undefined: zero variance")]
    ZeroVariance,
    #[error("relative efficiency undefined: zero mean squared error")]
    ZeroMse,
    #[error("period `{name}` is empty: start {start} is after end {end}")]
    InvalidPeriod { name: String, start: WeekId, end: WeekId },
    #[error("bootstrap produced only degenerate replicates")]
    DegenerateReplicates,
    #[error("invalid bootstrap settings: {0}")]
    InvalidBootstrap(String),
}

/// A named evaluation window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub name: String,
    pub start: EpiWeek,
    pub end: EpiWeek,
}

impl Period {
    pub fn new(name: impl Into<String>, start: EpiWeek, end: EpiWeek) -> Result<Self, EvalError> {
        let name = name.into();
        if start.id() > end.id() {
            return Err(EvalError::InvalidPeriod { name, start: start.id(), end: end.id() });
        }
        Ok(Period { name, start, end })
    }
}

/// Index range of the weeks falling inside the period.
pub fn period_indices(weeks: &[EpiWeek], period: &Period) -> std::ops::Range<usize> {
    let a = weeks.partition_point(|w| w.id() < period.start.id());
    let b = weeks.partition_point(|w| w.id() <= period.end.id());
    a..b
}

fn check_aligned(estimates: &[f64], targets: &[f64], need: usize) -> Result<(), EvalError> {
    if estimates.len() != targets.len() {
        return Err(EvalError::LengthMismatch(estimates.len(), targets.len()));
    }
    if estimates.len() < need {
        return Err(EvalError::EmptyPeriod { need, got: estimates.len() });
    }
    Ok(())
}

/// Root mean squared error.
pub fn rmse(estimates: &[f64], targets: &[f64]) -> Result<f64, EvalError> {
    check_aligned(estimates, targets, 2)?;
    let n = estimates.len() as f64;
    let ss: f64 = estimates.iter().zip(targets).map(|(e, t)| (e - t) * (e - t)).sum();
    Ok((ss / n).sqrt())
}

/// Mean absolute error.
pub fn mae(estimates: &[f64], targets: &[f64]) -> Result<f64, EvalError> {
    check_aligned(estimates, targets, 2)?;
    let n = estimates.len() as f64;
    Ok(estimates.iter().zip(targets).map(|(e, t)| (e - t).abs()).sum::<f64>() / n)
}

/// Mean absolute percentage error, `mean(|estimate - target| / target)`.
pub fn mape(estimates: &[f64], targets: &[f64]) -> Result<f64, EvalError> {
    check_aligned(estimates, targets, 2)?;
    let mut acc = 0.0;
    for (i, (e, t)) in estimates.iter().zip(targets).enumerate() {
        if *t == 0.0 {
            return Err(EvalError::ZeroTarget(i));
        }
        acc += (e - t).abs() / t;
    }
    Ok(acc / estimates.len() as f64)
}

/// Sample Pearson correlation.
pub fn correlation(estimates: &[f64], targets: &[f64]) -> Result<f64, EvalError> {
    check_aligned(estimates, targets, 3)?;
    let n = estimates.len() as f64;
    let me = estimates.iter().sum::<f64>() / n;
    let mt = targets.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (e, t) in estimates.iter().zip(targets) {
        sxy += (e - me) * (t - mt);
        sxx += (e - me) * (e - me);
        syy += (t - mt) * (t - mt);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Correlation of first differences: how well the estimate tracks changes
/// in the target.
pub fn correlation_of_increment(estimates: &[f64], targets: &[f64]) -> Result<f64, EvalError> {
    check_aligned(estimates, targets, 3)?;
    let de: Vec<f64> = estimates.windows(2).map(|w| w[1] - w[0]).collect();
    let dt: Vec<f64> = targets.windows(2).map(|w| w[1] - w[0]).collect();
    let n = de.len() as f64;
    let me = de.iter().sum::<f64>() / n;
    let mt = dt.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (e, t) in de.iter().zip(&dt) {
        sxy += (e - me) * (t - mt);
        sxx += (e - me) * (e - me);
        syy += (t - mt) * (t - mt);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Mean squared error of an error series (estimate minus target, per week).
pub fn mean_squared(errors: &[f64]) -> f64 {
    errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64
}

/// Observed relative efficiency of method 1 to method 2: the ratio of
/// method 2's mean squared error to method 1's. Values above one mean
/// method 1 is the more accurate of the two.
pub fn relative_efficiency(errors1: &[f64], errors2: &[f64]) -> Result<f64, EvalError> {
    if errors1.len() != errors2.len() {
        return Err(EvalError::LengthMismatch(errors1.len(), errors2.len()));
    }
    if errors1.is_empty() {
        return Err(EvalError::EmptyPeriod { need: 1, got: 0 });
    }
    let mse1 = mean_squared(errors1);
    if mse1 == 0.0 {
        return Err(EvalError::ZeroMse);
    }
    Ok(mean_squared(errors2) / mse1)
}
