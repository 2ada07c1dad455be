//! Stationary-bootstrap confidence interval for the relative efficiency.
//!
//! Error series of the two methods are resampled jointly as pairs, by
//! concatenating blocks with geometrically distributed lengths (mean
//! `mean_block_length`), uniform random start indices, and circular
//! wrap-around, so the autocorrelation and cross-correlation of the errors
//! survive resampling. The interval is the basic bootstrap interval for
//! the log efficiency, exponentiated back.

use super::{mean_squared, relative_efficiency, EvalError};
use crate::rng;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// A relative-efficiency point estimate with its bootstrap interval.
///
/// `ci_low <= ci_high` always holds; the basic bootstrap interval is not
/// guaranteed to contain the point estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyEstimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub replicates: usize,
    pub mean_block_length: f64,
    pub level: f64,
    pub seed: u64,
}

/// One geometric block length with mean `mean_block_length` (support 1, 2,
/// ...), by inverse transform from a single uniform draw. A mean of 1 or
/// less consumes no randomness and always returns 1.
pub fn geometric_block_length(rng: &mut impl Rng, mean_block_length: f64) -> usize {
    let p = 1.0 / mean_block_length;
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = rng.gen();
    1 + ((1.0 - u).ln() / (1.0 - p).ln()).floor() as usize
}

/// Circularly wrapped index sequence of length `n` built from random blocks.
fn resample_indices(rng: &mut impl Rng, n: usize, mean_block_length: f64) -> Vec<usize> {
    let mut idx = Vec::with_capacity(n);
    while idx.len() < n {
        let start = rng.gen_range(0..n);
        let len = geometric_block_length(rng, mean_block_length);
        for i in 0..len {
            if idx.len() == n {
                break;
            }
            idx.push((start + i) % n);
        }
    }
    idx
}

/// Attempts per replicate before giving up on degenerate (zero mean
/// squared error) resamples.
const MAX_ATTEMPTS_PER_REPLICATE: usize = 10;

/// Log relative-efficiency of every bootstrap replicate, in replicate
/// order. Each replicate draws from its own seed substream, so the vector
/// is independent of evaluation order.
pub fn bootstrap_log_ratios(
    errors1: &[f64],
    errors2: &[f64],
    mean_block_length: f64,
    replicates: usize,
    seed: u64,
) -> Result<Vec<f64>, EvalError> {
    let n = errors1.len();
    if n != errors2.len() {
        return Err(EvalError::LengthMismatch(n, errors2.len()));
    }
    if n < 2 {
        return Err(EvalError::EmptyPeriod { need: 2, got: n });
    }
    if mean_block_length.is_nan() || mean_block_length < 1.0 || replicates == 0 {
        return Err(EvalError::InvalidBootstrap(format!(
            "mean block length {mean_block_length}, replicates {replicates}"
        )));
    }
    (0..replicates)
        .into_par_iter()
        .map(|r| -> Result<f64, EvalError> {
            let mut rng = rng::stream_rng(seed, r as u64);
            for _ in 0..MAX_ATTEMPTS_PER_REPLICATE {
                let idx = resample_indices(&mut rng, n, mean_block_length);
                let mut s1 = 0.0;
                let mut s2 = 0.0;
                for &i in &idx {
                    s1 += errors1[i] * errors1[i];
                    s2 += errors2[i] * errors2[i];
                }
                if s1 > 0.0 && s2 > 0.0 {
                    return Ok((s2 / s1).ln());
                }
            }
            Err(EvalError::DegenerateReplicates)
        })
        .collect()
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Basic-bootstrap confidence interval for the relative efficiency of
/// method 1 to method 2, built on the log scale and exponentiated.
/// Deterministic for a fixed seed; replicates run in parallel.
pub fn stationary_bootstrap_ci(
    errors1: &[f64],
    errors2: &[f64],
    mean_block_length: f64,
    replicates: usize,
    level: f64,
    seed: u64,
) -> Result<EfficiencyEstimate, EvalError> {
    if !(0.0 < level && level < 1.0) {
        return Err(EvalError::InvalidBootstrap(format!("confidence level {level}")));
    }
    let point = relative_efficiency(errors1, errors2)?;
    if mean_squared(errors2) == 0.0 {
        return Err(EvalError::ZeroMse);
    }
    let mut ratios = bootstrap_log_ratios(errors1, errors2, mean_block_length, replicates, seed)?;
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = 1.0 - level;
    let log_point = point.ln();
    let lo = 2.0 * log_point - quantile(&ratios, 1.0 - alpha / 2.0);
    let hi = 2.0 * log_point - quantile(&ratios, alpha / 2.0);
    Ok(EfficiencyEstimate {
        point,
        ci_low: lo.exp(),
        ci_high: hi.exp(),
        replicates,
        mean_block_length,
        level,
        seed,
    })
}
