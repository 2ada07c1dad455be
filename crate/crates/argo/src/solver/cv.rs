//! K-fold cross-validation for the penalty hyperparameters.
//!
//! The free hyperparameters of each regime are searched on a log-spaced
//! grid anchored at the smallest all-zero penalty (per group where the
//! penalties are separate). Grids are walked from the largest penalty down
//! with warm starts; ties in mean held-out error go to the larger penalty.

use super::{
    fit_inner, lambda_max, lambda_max_by_group, standardize, DesignMatrix, PenaltyRegime,
    PenaltySpec, SolverError,
};
use crate::rng;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How observations are assigned to folds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldStrategy {
    /// Seeded shuffle of observation indices (the default).
    Shuffled,
    /// Contiguous blocks in time order.
    Contiguous,
}

/// Grid geometry and fold structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Grid points for regimes with one free hyperparameter.
    pub points_1d: usize,
    /// Grid points per axis for regimes with two free hyperparameters.
    pub points_2d: usize,
    /// Log10 span of each axis below its anchor.
    pub decades: f64,
    pub folds: usize,
    pub strategy: FoldStrategy,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            points_1d: 30,
            points_2d: 15,
            decades: 4.0,
            folds: 10,
            strategy: FoldStrategy::Shuffled,
        }
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvPoint {
    pub spec: PenaltySpec,
    /// Mean over folds of the held-out mean squared error; infinite for
    /// unusable points.
    pub mean_error: f64,
    /// Standard error of the fold errors.
    pub se: f64,
    /// Whether this point's mean error is within one standard error of the
    /// best point's.
    pub within_one_se_of_best: bool,
    /// False when the point sits past the depth where some training fold
    /// already interpolates (or stopped converging); such points carry no
    /// usable held-out error and are never selected.
    pub usable: bool,
}

/// All evaluated grid points, in descending-penalty order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvTable {
    pub points: Vec<CvPoint>,
    pub selected: usize,
    pub folds: usize,
    pub seed: u64,
    /// Indices where a fresh warm-start path begins (two-dimensional grids
    /// walk one path per outer-axis value).
    pub segment_starts: Vec<usize>,
}

impl CvTable {
    /// The warm-start path leading to the selected point: from the start
    /// of its grid segment down to the point itself.
    pub fn path_to_selected(&self) -> Vec<PenaltySpec> {
        let start = self
            .segment_starts
            .iter()
            .copied()
            .filter(|&s| s <= self.selected)
            .max()
            .unwrap_or(0);
        self.points[start..=self.selected].iter().map(|p| p.spec).collect()
    }
}

/// Consecutive non-improving path points a fold tolerates before
/// abandoning the rest of the segment.
const PATH_PATIENCE: usize = 4;

/// Log-spaced grid from `anchor` down `decades` orders of magnitude,
/// descending. A non-positive anchor collapses to the single point 0.
fn geom_grid(anchor: f64, points: usize, decades: f64) -> Vec<f64> {
    if anchor <= 0.0 {
        return vec![0.0];
    }
    if points <= 1 {
        return vec![anchor];
    }
    (0..points)
        .map(|i| anchor * 10f64.powf(-decades * i as f64 / (points - 1) as f64))
        .collect()
}

/// Grid of candidate specs for a regime, in the order used for warm starts
/// and tie-breaking (larger penalties first; the secondary axis outermost),
/// plus the indices where a fresh warm-start segment begins.
fn candidate_grid(
    design: &DesignMatrix,
    regime: PenaltyRegime,
    grid: &GridConfig,
) -> (Vec<PenaltySpec>, Vec<usize>) {
    let shared_anchor = lambda_max(design);
    let (lag_anchor, exo_anchor) = lambda_max_by_group(design);
    let two_axis = |outer: Vec<f64>, inner: Vec<f64>, mk: fn(f64, f64) -> PenaltySpec| {
        let mut specs = Vec::with_capacity(outer.len() * inner.len());
        let mut starts = Vec::with_capacity(outer.len());
        for &o in &outer {
            starts.push(specs.len());
            for &i in &inner {
                specs.push(mk(o, i));
            }
        }
        (specs, starts)
    };
    match regime {
        PenaltyRegime::SameL1 => (
            geom_grid(shared_anchor, grid.points_1d, grid.decades)
                .into_iter()
                .map(PenaltySpec::same_l1)
                .collect(),
            vec![0],
        ),
        PenaltyRegime::SameL2 => (
            geom_grid(shared_anchor, grid.points_1d, grid.decades)
                .into_iter()
                .map(PenaltySpec::same_l2)
                .collect(),
            vec![0],
        ),
        PenaltyRegime::SeparateL1 => two_axis(
            geom_grid(lag_anchor, grid.points_2d, grid.decades),
            geom_grid(exo_anchor, grid.points_2d, grid.decades),
            PenaltySpec::separate_l1,
        ),
        PenaltyRegime::SeparateL2 => two_axis(
            geom_grid(lag_anchor, grid.points_2d, grid.decades),
            geom_grid(exo_anchor, grid.points_2d, grid.decades),
            PenaltySpec::separate_l2,
        ),
        PenaltyRegime::SameElasticNet => two_axis(
            geom_grid(shared_anchor, grid.points_2d, grid.decades),
            geom_grid(shared_anchor, grid.points_2d, grid.decades),
            // outer axis is the quadratic penalty, inner the L1 path
            |eta, lambda| PenaltySpec::same_elastic_net(lambda, eta),
        ),
    }
}

/// Fold test-index sets, sizes differing by at most one.
fn fold_indices(n: usize, grid: &GridConfig, seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    if grid.strategy == FoldStrategy::Shuffled {
        let mut r = rng::stream_rng(seed, 0xF01D);
        order.shuffle(&mut r);
    }
    let base = n / grid.folds;
    let rem = n % grid.folds;
    let mut out = Vec::with_capacity(grid.folds);
    let mut at = 0;
    for k in 0..grid.folds {
        let size = base + usize::from(k < rem);
        out.push(order[at..at + size].to_vec());
        at += size;
    }
    out
}

/// First strict minimum of the mean errors; earlier (larger-penalty) grid
/// points win ties.
fn select_best(means: &[f64]) -> usize {
    let mut best = 0;
    for (i, &m) in means.iter().enumerate() {
        if m < means[best] {
            best = i;
        }
    }
    best
}

/// 10-fold cross-validation over the regime's free hyperparameters.
///
/// Returns the resolved spec of the winning grid point together with the
/// full table of per-point mean errors and standard errors. Deterministic
/// for a fixed seed; folds are evaluated in parallel.
pub fn cross_validate(
    design: &DesignMatrix,
    regime: PenaltyRegime,
    grid: &GridConfig,
    seed: u64,
) -> Result<(PenaltySpec, CvTable), SolverError> {
    let n = design.n_rows();
    if n < 2 * grid.folds {
        return Err(SolverError::InsufficientData { need: 2 * grid.folds, got: n });
    }
    let (specs, segment_starts) = candidate_grid(design, regime, grid);
    let folds = fold_indices(n, grid, seed);

    // Per fold: held-out MSE at every grid point, walked with warm starts.
    // A fold abandons the rest of a warm-start segment once the walk is
    // pointless: the training fit interpolates, the solver stopped
    // converging, or the held-out error has not improved for several
    // consecutive points. The window is short and wide, so the deep end of
    // each path degenerates and cannot be the held-out minimizer.
    let fold_errors: Vec<Vec<f64>> = folds
        .par_iter()
        .map(|test_idx| -> Result<Vec<f64>, SolverError> {
            let mut is_test = vec![false; n];
            for &i in test_idx {
                is_test[i] = true;
            }
            let train_idx: Vec<usize> = (0..n).filter(|i| !is_test[*i]).collect();
            let sub = design.subset_rows(&train_idx);
            let std = standardize(&sub);
            let total_ss: f64 = std.yc.iter().map(|v| v * v).sum();
            let test_rows: Vec<Vec<f64>> = test_idx.iter().map(|&i| design.row(i)).collect();
            let mut warm: Option<Vec<f64>> = None;
            let mut errs = Vec::with_capacity(specs.len());
            let mut dead = false;
            let mut best_err = f64::INFINITY;
            let mut since_best = 0usize;
            for (g, spec) in specs.iter().enumerate() {
                if segment_starts.contains(&g) {
                    dead = false;
                    warm = None;
                    best_err = f64::INFINITY;
                    since_best = 0;
                }
                if dead {
                    errs.push(f64::INFINITY);
                    continue;
                }
                match fit_inner(&sub, spec, &std, warm.as_deref()) {
                    Ok((fit, w)) => {
                        let mut sse = 0.0;
                        for (row, &i) in test_rows.iter().zip(test_idx) {
                            let e = design.response()[i] - fit.predict(row);
                            sse += e * e;
                        }
                        let mse = sse / test_idx.len() as f64;
                        errs.push(mse);
                        if mse < best_err {
                            best_err = mse;
                            since_best = 0;
                        } else {
                            since_best += 1;
                        }
                        // training residual recovered from the stored objective
                        let penalty: f64 = sub
                            .groups()
                            .iter()
                            .zip(&w)
                            .map(|(&g, &wj)| {
                                spec.lambda_for(g) * wj.abs() + spec.eta_for(g) * wj * wj
                            })
                            .sum();
                        let rss =
                            2.0 * sub.n_rows() as f64 * (fit.objective_value - penalty);
                        if rss <= 1e-10 * total_ss || since_best >= PATH_PATIENCE {
                            dead = true;
                        }
                        warm = Some(w);
                    }
                    Err(SolverError::NonConvergence(_)) => {
                        dead = true;
                        errs.push(f64::INFINITY);
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(errs)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let kf = grid.folds as f64;
    let mut points = Vec::with_capacity(specs.len());
    let mut means = Vec::with_capacity(specs.len());
    for (g, spec) in specs.iter().enumerate() {
        let vals: Vec<f64> = fold_errors.iter().map(|f| f[g]).collect();
        let usable = vals.iter().all(|v| v.is_finite());
        let (mean, se) = if usable {
            let mean = vals.iter().sum::<f64>() / kf;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (kf - 1.0);
            (mean, (var / kf).sqrt())
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        means.push(mean);
        points.push(CvPoint {
            spec: *spec,
            mean_error: mean,
            se,
            within_one_se_of_best: false,
            usable,
        });
    }
    if means.iter().all(|m| !m.is_finite()) {
        return Err(SolverError::NoUsableGridPoint);
    }
    let selected = select_best(&means);
    let threshold = points[selected].mean_error + points[selected].se;
    for p in &mut points {
        p.within_one_se_of_best = p.mean_error <= threshold;
    }
    let spec = points[selected].spec;
    Ok((spec, CvTable { points, selected, folds: grid.folds, seed, segment_starts }))
}
