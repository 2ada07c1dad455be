//! Variable transformations: logit for activity levels, shifted log for
//! search frequencies, and the rescaling of standardized panels onto the
//! [0, 100] search scale.

use crate::series::{PanelScale, SearchPanel, SeriesError, Unit, WeeklySeries};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest representable double strictly below 1.
const ONE_MINUS_EPS: f64 = 1.0 - f64::EPSILON / 2.0;

/// Parameters of the variable transforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    /// Shift added to search frequencies before taking the log, so that a
    /// frequency of zero stays finite.
    pub delta: f64,
    /// Divisor mapping published percent values to proportions.
    pub percent_divisor: f64,
}

impl Default for TransformParams {
    fn default() -> Self {
        TransformParams { delta: 0.5, percent_divisor: 100.0 }
    }
}

impl TransformParams {
    pub fn validate(&self) -> Result<(), TransformError> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(TransformError::InvalidDelta(self.delta));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("logit domain error: {0} is not strictly inside (0, 1)")]
    LogitDomain(f64),
    #[error("negative search frequency {0}")]
    NegativeFrequency(f64),
    #[error("degenerate column: all {0} entries are identical, cannot rescale")]
    DegenerateColumn(usize),
    #[error("column has fewer than 2 values")]
    ColumnTooShort,
    #[error("delta must be positive and finite, got {0}")]
    InvalidDelta(f64),
}

/// ln(p / (1 - p)) for a proportion strictly inside (0, 1).
pub fn logit(p: f64) -> Result<f64, TransformError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(TransformError::LogitDomain(p));
    }
    Ok((p / (1.0 - p)).ln())
}

/// 1 / (1 + exp(-y)), evaluated in the branch that never overflows and
/// clamped to the open unit interval at the representable boundary.
pub fn inverse_logit(y: f64) -> f64 {
    let v = if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    };
    v.clamp(f64::MIN_POSITIVE, ONE_MINUS_EPS)
}

/// ln(x + delta) for a raw search frequency x >= 0.
pub fn log_search(x: f64, params: &TransformParams) -> Result<f64, TransformError> {
    if x < 0.0 {
        return Err(TransformError::NegativeFrequency(x));
    }
    Ok((x + params.delta).ln())
}

/// Affine map sending the column minimum to 0 and maximum to 100.
///
/// Columns already spanning exactly [0, 100] are returned unchanged, which
/// makes the map idempotent bit-for-bit.
pub fn rescale_correlate(column: &[f64]) -> Result<Vec<f64>, TransformError> {
    if column.len() < 2 {
        return Err(TransformError::ColumnTooShort);
    }
    let min = column.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = column.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Err(TransformError::DegenerateColumn(column.len()));
    }
    if min == 0.0 && max == 100.0 {
        return Ok(column.to_vec());
    }
    let span = max - min;
    Ok(column.iter().map(|&x| (x - min) / span * 100.0).collect())
}

/// Logit transform of a percent-unit series; values are divided by
/// `percent_divisor` exactly once here.
pub fn logit_series(
    series: &WeeklySeries,
    params: &TransformParams,
) -> Result<WeeklySeries, TransformError> {
    assert_eq!(series.unit(), Unit::Percent, "logit expects a percent-unit series");
    let mut out = Vec::with_capacity(series.len());
    for &v in series.values() {
        out.push(logit(v / params.percent_divisor)?);
    }
    Ok(WeeklySeries::new(series.weeks().to_vec(), out, Unit::Free)
        .expect("axis already validated"))
}

/// Percent-scale activity level from a logit-scale value.
pub fn percent_from_logit(y: f64, params: &TransformParams) -> f64 {
    inverse_logit(y) * params.percent_divisor
}

/// Shifted-log transform of a raw panel.
pub fn log_panel(panel: &SearchPanel, params: &TransformParams) -> Result<SearchPanel, SeriesError> {
    assert_eq!(panel.scale(), PanelScale::Raw, "log transform expects a raw panel");
    Ok(panel.map_values(PanelScale::Log, |x| (x + params.delta).ln()))
}
