//! Benchmark estimators: the naive carry-forward, AR(3), and AR(3) with an
//! external estimate series as an exogenous regressor. All three work on
//! the original percent scale; the search-only benchmark reuses the main
//! model with the lag block removed.

use super::ModelError;
use crate::series::WeeklySeries;
use crate::week::WeekId;
use nalgebra::{DMatrix, DVector};

/// Prediction clamp keeping benchmark output inside the open (0, 100).
const CLAMP_EPS: f64 = 1e-6;

/// The previous week's published value, used as the estimate for `t`.
/// `visible` must end at the week before `t`.
pub fn naive(visible: &WeeklySeries, t: WeekId) -> Result<f64, ModelError> {
    if visible.end() >= t {
        return Err(ModelError::Misaligned(format!(
            "visible history ends at {} which is not before {}",
            visible.end(),
            t
        )));
    }
    Ok(visible.values()[visible.len() - 1])
}

/// Ordinary least squares with centered columns; constant columns are
/// dropped (their weight moves into the intercept) and a rank-deficient
/// normal matrix falls back to a ridge of 1e-8 on the diagonal.
fn ols_drop_constant(columns: &[Vec<f64>], y: &[f64]) -> (f64, Vec<f64>) {
    let n = y.len();
    let nf = n as f64;
    let y_mean = y.iter().sum::<f64>() / nf;
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    let mut means = Vec::with_capacity(columns.len());
    let mut keep: Vec<usize> = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let m = col.iter().sum::<f64>() / nf;
        means.push(m);
        let sd = (col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / nf).sqrt();
        if sd > 1e-12 * m.abs().max(1.0) {
            keep.push(j);
        }
    }
    let mut coefs = vec![0.0; columns.len()];
    if !keep.is_empty() {
        let k = keep.len();
        let mut a = DMatrix::zeros(k, k);
        let mut b = DVector::zeros(k);
        for (ri, &j) in keep.iter().enumerate() {
            let cj: Vec<f64> = columns[j].iter().map(|v| v - means[j]).collect();
            b[ri] = cj.iter().zip(&yc).map(|(x, y)| x * y).sum();
            for (ci, &l) in keep.iter().enumerate().skip(ri) {
                let dot: f64 =
                    cj.iter().zip(columns[l].iter().map(|v| v - means[l])).map(|(x, y)| x * y).sum();
                a[(ri, ci)] = dot;
                a[(ci, ri)] = dot;
            }
        }
        let solution = match a.clone().cholesky() {
            Some(ch) => ch.solve(&b),
            None => {
                let mut ridged = a;
                for i in 0..k {
                    ridged[(i, i)] += 1e-8;
                }
                match ridged.clone().cholesky() {
                    Some(ch) => ch.solve(&b),
                    None => ridged.lu().solve(&b).unwrap_or_else(|| DVector::zeros(k)),
                }
            }
        };
        for (ri, &j) in keep.iter().enumerate() {
            coefs[j] = solution[ri];
        }
    }
    let intercept = y_mean - coefs.iter().zip(&means).map(|(c, m)| c * m).sum::<f64>();
    (intercept, coefs)
}

fn clamp_percent(v: f64) -> f64 {
    v.clamp(CLAMP_EPS, 100.0 - CLAMP_EPS)
}

/// AR(3) one-step prediction: least squares of `p_t` on its three lags over
/// the trailing `window` weeks of `visible`, on the percent scale.
pub fn ar3(visible: &WeeklySeries, t: WeekId, window: usize) -> Result<f64, ModelError> {
    ar3_with_extra(visible, t, window, None)
}

/// AR(3) plus an external estimate series as a fourth regressor, using the
/// external value at `t` for the prediction.
pub fn gft_ar3(
    visible: &WeeklySeries,
    external: &WeeklySeries,
    t: WeekId,
    window: usize,
) -> Result<f64, ModelError> {
    ar3_with_extra(visible, t, window, Some(external))
}

fn ar3_with_extra(
    visible: &WeeklySeries,
    t: WeekId,
    window: usize,
    external: Option<&WeeklySeries>,
) -> Result<f64, ModelError> {
    const LAGS: usize = 3;
    if visible.end() >= t {
        return Err(ModelError::Misaligned(format!(
            "visible history ends at {} which is not before {}",
            visible.end(),
            t
        )));
    }
    let len = visible.len();
    if len < window + LAGS {
        return Err(ModelError::InsufficientHistory {
            week: t,
            need: window + LAGS,
            have: len,
        });
    }
    let v = visible.values();
    let first_row = len - window;
    let mut columns: Vec<Vec<f64>> = (1..=LAGS)
        .map(|lag| (0..window).map(|r| v[first_row + r - lag]).collect())
        .collect();
    if let Some(ext) = external {
        let mut col = Vec::with_capacity(window);
        for r in 0..window {
            let wid = visible.weeks()[first_row + r].id();
            col.push(ext.value_at(wid).ok_or(ModelError::NotCovered(wid))?);
        }
        columns.push(col);
    }
    let response: Vec<f64> = (0..window).map(|r| v[first_row + r]).collect();
    let (intercept, coefs) = ols_drop_constant(&columns, &response);

    let mut pred = intercept;
    for (lag, c) in coefs.iter().take(LAGS).enumerate() {
        pred += c * v[len - 1 - lag];
    }
    if let Some(ext) = external {
        let x_t = ext.value_at(t).ok_or(ModelError::NotCovered(t))?;
        pred += coefs[LAGS] * x_t;
    }
    Ok(clamp_percent(pred))
}
