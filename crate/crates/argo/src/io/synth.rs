//! Seeded synthetic-data generator.
//!
//! Simulates the state-space data-generating process: the logit-scale
//! activity level follows a stationary AR(N) recursion with Gaussian
//! noise, and the log-scale search panel is drawn conditionally Gaussian
//! around a per-term loading of the current activity. A 500-week burn-in
//! is discarded. The generator returns the panel on the log scale (the
//! scale the process lives on); [`SyntheticDataset::panel_raw`] converts
//! it to an integer trends-format panel for file emission.

use crate::rng;
use crate::series::{PanelScale, PanelSource, SearchPanel, Unit, WeeklySeries};
use crate::transform::{self, TransformParams};
use crate::vintage::VintageSeries;
use crate::week::EpiWeek;
use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const BURN_IN_WEEKS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaEntry {
    pub lag: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaEntry {
    pub term: usize,
    pub value: f64,
}

fn default_start_year() -> i32 {
    2000
}

fn default_mu_x() -> f64 {
    3.5
}

fn default_q_diag() -> f64 {
    0.01
}

fn default_gft_noise_sd() -> f64 {
    0.05
}

fn default_true() -> bool {
    true
}

/// Generator configuration: planted AR coefficients (sparse), term
/// loadings (sparse), and the conditional covariance of the panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub n_weeks: usize,
    /// AR order of the planted process.
    pub n_lags: usize,
    /// Number of search terms (K).
    pub n_terms: usize,
    pub mu_y: f64,
    pub sigma2: f64,
    #[serde(default)]
    pub alpha: Vec<AlphaEntry>,
    #[serde(default)]
    pub beta: Vec<BetaEntry>,
    /// Scalar mean of the log-scale panel, broadcast over terms unless
    /// `mu_x_vec` is given.
    #[serde(default = "default_mu_x")]
    pub mu_x: f64,
    #[serde(default)]
    pub mu_x_vec: Option<Vec<f64>>,
    /// Scalar conditional variance, broadcast unless `q_diag_vec` or
    /// `q_dense` is given.
    #[serde(default = "default_q_diag")]
    pub q_diag: f64,
    #[serde(default)]
    pub q_diag_vec: Option<Vec<f64>>,
    #[serde(default)]
    pub q_dense: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_start_year")]
    pub start_year: i32,
    /// Also synthesize an external estimate series (a noisy transform of
    /// the truth) for the external-signal benchmark.
    #[serde(default = "default_true")]
    pub emit_gft: bool,
    #[serde(default = "default_gft_noise_sd")]
    pub gft_noise_sd: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("planted AR polynomial is not stationary: spectral radius {0}")]
    NonStationary(f64),
    #[error("invalid synthetic spec: {0}")]
    Invalid(String),
}

/// Planted parameters echoed next to the generated files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruthRecord {
    pub spec: SyntheticSpec,
    /// Dense planted AR coefficients (length `n_lags`).
    pub alpha_dense: Vec<f64>,
    /// Dense planted term loadings (length `n_terms`).
    pub beta_dense: Vec<f64>,
    /// Stationary mean of the logit-scale process.
    pub stationary_mean: f64,
}

/// A generated dataset: finalized surveillance (no revisions), the
/// log-scale panel, the optional external series, and the truth record.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub vintage: VintageSeries,
    pub panel_log: SearchPanel,
    pub gft: Option<WeeklySeries>,
    pub truth: TruthRecord,
    /// Logit-scale activity path (post burn-in).
    pub y_logit: Vec<f64>,
}

impl SyntheticDataset {
    /// The panel converted to raw integer trends scale: `round(exp(h) -
    /// delta)` clamped into [0, 100]. Ingesting the written file and
    /// re-applying the shifted log recovers the log-scale values up to the
    /// integer quantization.
    pub fn panel_raw(&self, params: &TransformParams) -> SearchPanel {
        self.panel_log
            .map_values(PanelScale::Raw, |h| ((h.exp() - params.delta).round()).clamp(0.0, 100.0))
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_weeks == 0 {
            return Err(SynthError::Invalid("n_weeks must be positive".into()));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(SynthError::Invalid(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if !self.mu_y.is_finite() || !self.mu_x.is_finite() || !self.gft_noise_sd.is_finite() {
            return Err(SynthError::Invalid("means and noise scales must be finite".into()));
        }
        for a in &self.alpha {
            if a.lag == 0 || a.lag > self.n_lags {
                return Err(SynthError::Invalid(format!(
                    "alpha lag {} outside 1..={}",
                    a.lag, self.n_lags
                )));
            }
            if !a.value.is_finite() {
                return Err(SynthError::Invalid(format!("alpha at lag {} is not finite", a.lag)));
            }
        }
        for b in &self.beta {
            if b.term >= self.n_terms {
                return Err(SynthError::Invalid(format!(
                    "beta term index {} outside 0..{}",
                    b.term, self.n_terms
                )));
            }
            if !b.value.is_finite() {
                return Err(SynthError::Invalid(format!("beta at term {} is not finite", b.term)));
            }
        }
        if let Some(v) = &self.mu_x_vec {
            if v.len() != self.n_terms {
                return Err(SynthError::Invalid("mu_x_vec length != n_terms".into()));
            }
        }
        if let Some(v) = &self.q_diag_vec {
            if v.len() != self.n_terms || v.iter().any(|x| *x <= 0.0) {
                return Err(SynthError::Invalid("q_diag_vec must have n_terms positive entries".into()));
            }
        }
        if let Some(q) = &self.q_dense {
            if q.len() != self.n_terms || q.iter().any(|r| r.len() != self.n_terms) {
                return Err(SynthError::Invalid("q_dense must be n_terms x n_terms".into()));
            }
        }
        let rho = self.spectral_radius();
        if rho >= 1.0 {
            return Err(SynthError::NonStationary(rho));
        }
        Ok(())
    }

    fn alpha_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_lags];
        for a in &self.alpha {
            out[a.lag - 1] = a.value;
        }
        out
    }

    fn beta_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_terms];
        for b in &self.beta {
            out[b.term] = b.value;
        }
        out
    }

    /// Spectral radius of the AR companion matrix; < 1 means stationary
    /// (all roots of the lag polynomial outside the unit circle).
    fn spectral_radius(&self) -> f64 {
        let alpha = self.alpha_dense();
        // drop trailing zero lags so the companion stays small
        let order = alpha.iter().rposition(|a| *a != 0.0).map_or(0, |i| i + 1);
        if order == 0 {
            return 0.0;
        }
        let mut companion = DMatrix::zeros(order, order);
        for (j, a) in alpha[..order].iter().enumerate() {
            companion[(0, j)] = *a;
        }
        for i in 1..order {
            companion[(i, i - 1)] = 1.0;
        }
        companion
            .complex_eigenvalues()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// 52-week synthetic calendar starting at week 1 of `start_year`.
fn synthetic_axis(start_year: i32, n: usize) -> Vec<EpiWeek> {
    let epoch: chrono::NaiveDate = "2000-01-08".parse().unwrap();
    let mut date = epoch + chrono::Duration::days((start_year - 2000) as i64 * 364);
    let mut year = start_year;
    let mut week = 1u8;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(EpiWeek::new(year, week, date).expect("synthetic week in range"));
        date += chrono::Duration::days(7);
        if week == 52 {
            year += 1;
            week = 1;
        } else {
            week += 1;
        }
    }
    out
}

/// Simulates the planted process. Deterministic for a fixed seed.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticDataset, SynthError> {
    spec.validate()?;
    let alpha = spec.alpha_dense();
    let beta = spec.beta_dense();
    let alpha_sum: f64 = alpha.iter().sum();
    let stationary_mean = spec.mu_y / (1.0 - alpha_sum);
    let sigma = spec.sigma2.sqrt();
    let k = spec.n_terms;

    let mu_x: Vec<f64> = match &spec.mu_x_vec {
        Some(v) => v.clone(),
        None => vec![spec.mu_x; k],
    };
    // Cholesky factor of Q (diagonal fast path)
    let chol: Option<DMatrix<f64>> = match &spec.q_dense {
        Some(rows) => {
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            let q = DMatrix::from_row_slice(k, k, &flat);
            Some(
                q.cholesky()
                    .ok_or_else(|| SynthError::Invalid("q_dense is not positive definite".into()))?
                    .l(),
            )
        }
        None => None,
    };
    let q_sd: Vec<f64> = match &spec.q_diag_vec {
        Some(v) => v.iter().map(|x| x.sqrt()).collect(),
        None => vec![spec.q_diag.sqrt(); k],
    };

    let mut main_rng = rng::stream_rng(spec.seed, 0);
    let mut lags = vec![stationary_mean; spec.n_lags.max(1)];
    let draw_y = |lags: &[f64], rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
        let mut m = spec.mu_y;
        for (a, y) in alpha.iter().zip(lags) {
            m += a * y;
        }
        let z: f64 = StandardNormal.sample(rng);
        m + sigma * z
    };

    for _ in 0..BURN_IN_WEEKS {
        let y = draw_y(&lags, &mut main_rng);
        lags.rotate_right(1);
        lags[0] = y;
    }

    let mut y_path = Vec::with_capacity(spec.n_weeks);
    let mut panel_rows: Vec<Vec<f64>> = Vec::with_capacity(spec.n_weeks);
    for _ in 0..spec.n_weeks {
        let y = draw_y(&lags, &mut main_rng);
        lags.rotate_right(1);
        lags[0] = y;
        y_path.push(y);
        let mut row: Vec<f64> = (0..k).map(|j| mu_x[j] + y * beta[j]).collect();
        match &chol {
            Some(l) => {
                let z: Vec<f64> =
                    (0..k).map(|_| StandardNormal.sample(&mut main_rng)).collect();
                for i in 0..k {
                    let mut acc = 0.0;
                    for j in 0..=i {
                        acc += l[(i, j)] * z[j];
                    }
                    row[i] += acc;
                }
            }
            None => {
                for (i, r) in row.iter_mut().enumerate() {
                    let z: f64 = StandardNormal.sample(&mut main_rng);
                    *r += q_sd[i] * z;
                }
            }
        }
        panel_rows.push(row);
    }

    let axis = synthetic_axis(spec.start_year, spec.n_weeks);
    let percent: Vec<f64> = y_path
        .iter()
        .map(|&y| transform::inverse_logit(y) * 100.0)
        .collect();
    let finalized = WeeklySeries::new(axis.clone(), percent, Unit::Percent)
        .map_err(|e| SynthError::Invalid(e.to_string()))?;
    let vintage = VintageSeries::without_revisions(finalized);

    let terms: Vec<String> = (0..k).map(|j| format!("term{j:03}")).collect();
    let panel_log = SearchPanel::with_scale(
        axis.clone(),
        terms,
        panel_rows,
        PanelSource::Trends,
        PanelScale::Log,
    )
    .map_err(|e| SynthError::Invalid(e.to_string()))?;

    let gft = if spec.emit_gft {
        let mut gft_rng = rng::stream_rng(spec.seed, 1);
        let values: Vec<f64> = y_path
            .iter()
            .map(|&y| {
                let z: f64 = StandardNormal.sample(&mut gft_rng);
                transform::inverse_logit(y + spec.gft_noise_sd * z) * 100.0
            })
            .collect();
        Some(
            WeeklySeries::new(axis, values, Unit::Percent)
                .map_err(|e| SynthError::Invalid(e.to_string()))?,
        )
    } else {
        None
    };

    let truth = TruthRecord {
        spec: spec.clone(),
        alpha_dense: alpha,
        beta_dense: beta,
        stationary_mean,
    };
    Ok(SyntheticDataset { vintage, panel_log, gft, truth, y_logit: y_path })
}
