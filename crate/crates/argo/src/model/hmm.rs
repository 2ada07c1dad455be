//! Gaussian predictive distribution of the state-space formulation.
//!
//! The latent activity level follows an AR(N) process and the K search
//! frequencies are conditionally Gaussian around a term-specific loading
//! of the current activity:
//!
//! ```text
//!   y_t = mu_y + sum_j alpha_j y_{t-j} + eps_t,   eps_t ~ N(0, sigma^2)
//!   X_t | y_t ~ N_K(mu_x + y_t * beta, Q)
//! ```
//!
//! Conditioning on the lag history and the current search vector gives a
//! normal predictive law whose mean is linear in `(y_lags, X_t)` and whose
//! variance does not depend on either:
//!
//! ```text
//!   var  = (1/sigma^2 + beta' Q^{-1} beta)^{-1}
//!   mean = var * ( (mu_y + alpha' y_lags)/sigma^2 + beta' Q^{-1} (X_t - mu_x) )
//! ```
//!
//! `Q^{-1}` is never formed; both products go through a Cholesky solve.

use super::ModelError;
use nalgebra::{DMatrix, DVector};

/// Parameters of the state-space formulation.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmParams {
    pub mu_y: f64,
    /// AR coefficients, lag order: `alpha[j]` multiplies `y_{t-1-j}`.
    pub alpha: Vec<f64>,
    pub sigma2: f64,
    pub mu_x: Vec<f64>,
    pub beta: Vec<f64>,
    /// K x K covariance of the search vector given the activity level.
    pub q: DMatrix<f64>,
}

impl HmmParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let k = self.beta.len();
        if self.mu_x.len() != k || self.q.nrows() != k || self.q.ncols() != k {
            return Err(ModelError::DimensionMismatch {
                expected: k,
                got: self.mu_x.len().max(self.q.nrows()),
            });
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(ModelError::InvalidSpec(format!(
                "sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        let scale = self.q.amax().max(1e-300);
        for i in 0..k {
            for j in (i + 1)..k {
                if (self.q[(i, j)] - self.q[(j, i)]).abs() > 1e-10 * scale {
                    return Err(ModelError::NotPositiveDefinite);
                }
            }
        }
        if self.q.clone().cholesky().is_none() {
            return Err(ModelError::NotPositiveDefinite);
        }
        Ok(())
    }
}

/// Mean and variance of the predictive distribution of `y_t` given the lag
/// history (most recent first) and the current search vector.
pub fn predictive_distribution(
    params: &HmmParams,
    y_lags: &[f64],
    x_t: &[f64],
) -> Result<(f64, f64), ModelError> {
    params.validate()?;
    if y_lags.len() != params.alpha.len() {
        return Err(ModelError::DimensionMismatch {
            expected: params.alpha.len(),
            got: y_lags.len(),
        });
    }
    if x_t.len() != params.beta.len() {
        return Err(ModelError::DimensionMismatch {
            expected: params.beta.len(),
            got: x_t.len(),
        });
    }
    let chol = params.q.clone().cholesky().ok_or(ModelError::NotPositiveDefinite)?;
    let beta = DVector::from_column_slice(&params.beta);
    let deviation = DVector::from_iterator(
        x_t.len(),
        x_t.iter().zip(&params.mu_x).map(|(x, m)| x - m),
    );
    let q_inv_beta = chol.solve(&beta);
    let q_inv_dev = chol.solve(&deviation);

    let ar_mean =
        params.mu_y + params.alpha.iter().zip(y_lags).map(|(a, y)| a * y).sum::<f64>();
    let precision = 1.0 / params.sigma2 + beta.dot(&q_inv_beta);
    let variance = 1.0 / precision;
    let mean = variance * (ar_mean / params.sigma2 + beta.dot(&q_inv_dev));
    Ok((mean, variance))
}
