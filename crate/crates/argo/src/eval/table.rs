//! Period-sliced comparison table across estimation methods.
//!
//! Error metrics are stored both raw and relative to the naive method
//! (whose relative value is exactly 1 by construction); correlations are
//! stored raw. The best method per metric and period is flagged.

use super::{
    correlation, correlation_of_increment, mae, mape, period_indices, rmse, EvalError, Period,
};
use crate::week::EpiWeek;
use serde::Serialize;

pub const NAIVE_METHOD: &str = "naive";

/// The five accuracy metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Rmse,
    Mae,
    Mape,
    Correlation,
    CorrelationOfIncrement,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Rmse,
        Metric::Mae,
        Metric::Mape,
        Metric::Correlation,
        Metric::CorrelationOfIncrement,
    ];

    /// Whether smaller values are better.
    pub fn lower_is_better(&self) -> bool {
        matches!(self, Metric::Rmse | Metric::Mae | Metric::Mape)
    }

    /// Whether the table reports this metric relative to the naive method.
    pub fn is_relative(&self) -> bool {
        self.lower_is_better()
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Metric::Rmse => "rmse",
            Metric::Mae => "mae",
            Metric::Mape => "mape",
            Metric::Correlation => "correlation",
            Metric::CorrelationOfIncrement => "correlation-of-increment",
        };
        write!(f, "{s}")
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub period: String,
    pub metric: Metric,
    pub method: String,
    /// Relative value for error metrics (ratio to naive), raw value for
    /// correlations.
    pub value: f64,
    /// Raw metric value on the percent scale.
    pub absolute: f64,
    /// Best method for this metric and period.
    pub best: bool,
}

/// The full comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricTable {
    pub rows: Vec<MetricRow>,
    pub methods: Vec<String>,
    pub period_names: Vec<String>,
}

impl MetricTable {
    pub fn get(&self, method: &str, period: &str, metric: Metric) -> Option<&MetricRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.period == period && r.metric == metric)
    }

    /// Raw error of the naive method for the period (the reference scale of
    /// the relative values).
    pub fn naive_absolute(&self, period: &str, metric: Metric) -> Option<f64> {
        self.get(NAIVE_METHOD, period, metric).map(|r| r.absolute)
    }
}

/// Computes all five metrics for every method over every period.
///
/// `weeks`, `targets`, and every method's estimates are aligned
/// element-wise; a method named `naive` must be present because the error
/// metrics are reported relative to it.
pub fn build_metric_table(
    weeks: &[EpiWeek],
    targets: &[f64],
    methods: &[(String, Vec<f64>)],
    periods: &[Period],
) -> Result<MetricTable, EvalError> {
    if methods.iter().all(|(name, _)| name != NAIVE_METHOD) {
        return Err(EvalError::InvalidBootstrap(format!(
            "metric table requires a `{NAIVE_METHOD}` method for relative reporting"
        )));
    }
    for (_, est) in methods {
        if est.len() != targets.len() {
            return Err(EvalError::LengthMismatch(est.len(), targets.len()));
        }
    }
    let mut rows = Vec::new();
    for period in periods {
        let idx = period_indices(weeks, period);
        let tgt = &targets[idx.clone()];
        let mut naive_abs: Option<[f64; 3]> = None;
        for (name, est) in methods {
            if name == NAIVE_METHOD {
                let e = &est[idx.clone()];
                naive_abs = Some([rmse(e, tgt)?, mae(e, tgt)?, mape(e, tgt)?]);
            }
        }
        let naive_abs = naive_abs.expect("naive method checked above");
        for (name, est) in methods {
            let e = &est[idx.clone()];
            for metric in Metric::ALL {
                let absolute = match metric {
                    Metric::Rmse => rmse(e, tgt)?,
                    Metric::Mae => mae(e, tgt)?,
                    Metric::Mape => mape(e, tgt)?,
                    Metric::Correlation => correlation(e, tgt)?,
                    Metric::CorrelationOfIncrement => correlation_of_increment(e, tgt)?,
                };
                let value = match metric {
                    Metric::Rmse => absolute / naive_abs[0],
                    Metric::Mae => absolute / naive_abs[1],
                    Metric::Mape => absolute / naive_abs[2],
                    _ => absolute,
                };
                rows.push(MetricRow {
                    period: period.name.clone(),
                    metric,
                    method: name.clone(),
                    value,
                    absolute,
                    best: false,
                });
            }
        }
    }
    // flag the best method per (period, metric)
    for period in periods {
        for metric in Metric::ALL {
            let mut best_idx: Option<usize> = None;
            for (i, row) in rows.iter().enumerate() {
                if row.period != period.name || row.metric != metric {
                    continue;
                }
                let better = match best_idx {
                    None => true,
                    Some(b) => {
                        if metric.lower_is_better() {
                            row.absolute < rows[b].absolute
                        } else {
                            row.absolute > rows[b].absolute
                        }
                    }
                };
                if better {
                    best_idx = Some(i);
                }
            }
            if let Some(b) = best_idx {
                rows[b].best = true;
            }
        }
    }
    Ok(MetricTable {
        rows,
        methods: methods.iter().map(|(n, _)| n.clone()).collect(),
        period_names: periods.iter().map(|p| p.name.clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn axis(n: usize) -> Vec<EpiWeek> {
        let mut out = Vec::new();
        let mut date: chrono::NaiveDate = "2012-01-07".parse().unwrap();
        for w in 1..=n {
            out.push(EpiWeek::new(2012, w as u8, date).unwrap());
            date += chrono::Duration::days(7);
        }
        out
    }

    #[test]
    fn naive_alone_is_all_ones() {
        let weeks = axis(6);
        let targets = vec![1.0, 2.0, 1.5, 3.0, 2.0, 2.5];
        let naive = vec![0.9, 1.0, 2.0, 1.5, 3.0, 2.0];
        let periods = vec![Period::new("whole", weeks[0], weeks[5]).unwrap()];
        let table = build_metric_table(
            &weeks,
            &targets,
            &[(NAIVE_METHOD.to_string(), naive)],
            &periods,
        )
        .unwrap();
        for metric in [Metric::Rmse, Metric::Mae, Metric::Mape] {
            let row = table.get(NAIVE_METHOD, "whole", metric).unwrap();
            assert_eq!(row.value, 1.0);
            assert!(row.absolute > 0.0);
            assert!(row.best);
        }
    }

    #[test]
    fn dominant_method_is_best_everywhere() {
        let weeks = axis(8);
        let targets: Vec<f64> = (0..8).map(|i| 2.0 + (i as f64 * 0.9).sin()).collect();
        let exact: Vec<f64> = targets.iter().map(|v| v + 0.01).collect();
        let sloppy: Vec<f64> = targets.iter().map(|v| v + 0.5 * (v - 2.0) + 0.3).collect();
        let naive: Vec<f64> =
            std::iter::once(1.9).chain(targets[..7].iter().copied()).collect();
        let periods = vec![Period::new("whole", weeks[0], weeks[7]).unwrap()];
        let table = build_metric_table(
            &weeks,
            &targets,
            &[
                ("exact".to_string(), exact),
                ("sloppy".to_string(), sloppy),
                (NAIVE_METHOD.to_string(), naive),
            ],
            &periods,
        )
        .unwrap();
        for metric in Metric::ALL {
            let row = table.get("exact", "whole", metric).unwrap();
            assert!(row.best, "exact should win {metric}");
        }
        // exactly one best per metric and period
        for metric in Metric::ALL {
            let n_best = table
                .rows
                .iter()
                .filter(|r| r.metric == metric && r.best)
                .count();
            assert_eq!(n_best, 1);
        }
    }

    #[test]
    fn union_of_periods_bounds_mae_and_mape() {
        let weeks = axis(10);
        let targets: Vec<f64> = (0..10).map(|i| 1.0 + 0.3 * i as f64).collect();
        let est: Vec<f64> = targets.iter().enumerate().map(|(i, v)| v + 0.1 * (i % 3) as f64).collect();
        let naive: Vec<f64> = std::iter::once(1.0).chain(targets[..9].iter().copied()).collect();
        let periods = vec![
            Period::new("a", weeks[0], weeks[4]).unwrap(),
            Period::new("b", weeks[5], weeks[9]).unwrap(),
            Period::new("union", weeks[0], weeks[9]).unwrap(),
        ];
        let table = build_metric_table(
            &weeks,
            &targets,
            &[("m".to_string(), est), (NAIVE_METHOD.to_string(), naive)],
            &periods,
        )
        .unwrap();
        for metric in [Metric::Mae, Metric::Mape] {
            let a = table.get("m", "a", metric).unwrap().absolute;
            let b = table.get("m", "b", metric).unwrap().absolute;
            let u = table.get("m", "union", metric).unwrap().absolute;
            assert!(u >= a.min(b) - 1e-12 && u <= a.max(b) + 1e-12, "{metric}: {a} {b} {u}");
        }
    }

    #[test]
    fn missing_naive_is_an_error() {
        let weeks = axis(3);
        let targets = vec![1.0, 2.0, 3.0];
        let periods = vec![Period::new("whole", weeks[0], weeks[2]).unwrap()];
        assert!(build_metric_table(
            &weeks,
            &targets,
            &[("m".to_string(), targets.clone())],
            &periods
        )
        .is_err());
    }

    #[test]
    fn relative_values_divide_by_naive() {
        let weeks = axis(4);
        let targets = vec![2.0, 3.0, 2.0, 3.0];
        let m = vec![2.5, 3.5, 2.5, 2.5];
        let naive = vec![3.0, 2.0, 3.0, 2.0];
        let periods = vec![Period::new("whole", weeks[0], weeks[3]).unwrap()];
        let table = build_metric_table(
            &weeks,
            &targets,
            &[("m".to_string(), m), (NAIVE_METHOD.to_string(), naive)],
            &periods,
        )
        .unwrap();
        let row = table.get("m", "whole", Metric::Mae).unwrap();
        assert_relative_eq!(row.absolute, 0.5, epsilon = 1e-12);
        assert_relative_eq!(row.value, 0.5, epsilon = 1e-12);
        assert_eq!(table.naive_absolute("whole", Metric::Mae).unwrap(), 1.0);
    }
}
