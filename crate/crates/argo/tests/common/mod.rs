//! Shared test oracles, independent of the library's solve paths.
//!
//! - a proximal-gradient (FISTA) minimizer of the same standardized
//!   penalized objective the coordinate-descent solver works on;
//! - a dense least-squares solver via normal equations;
//! - explicit joint-Gaussian conditioning for the predictive distribution.

#![allow(dead_code)]

use argo::solver::{DesignMatrix, Group, PenaltySpec};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Standardizes like the production solver specifies (population sd,
/// centered response), but with its own arithmetic.
pub struct StandardizedProblem {
    pub n: usize,
    pub p: usize,
    pub xs: Vec<Vec<f64>>,
    pub yc: Vec<f64>,
    pub scales: Vec<f64>,
    pub lambda: Vec<f64>,
    pub eta: Vec<f64>,
}

pub fn standardize_problem(design: &DesignMatrix, spec: &PenaltySpec) -> StandardizedProblem {
    let n = design.n_rows();
    let nf = n as f64;
    let p = design.n_cols();
    let y_mean = design.response().iter().sum::<f64>() / nf;
    let yc: Vec<f64> = design.response().iter().map(|v| v - y_mean).collect();
    let mut xs = Vec::with_capacity(p);
    let mut scales = Vec::with_capacity(p);
    for j in 0..p {
        let col = design.column(j);
        let m = col.iter().sum::<f64>() / nf;
        let sd = (col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / nf).sqrt();
        if sd <= 1e-12 * m.abs().max(1.0) {
            xs.push(vec![0.0; n]);
            scales.push(0.0);
        } else {
            xs.push(col.iter().map(|v| (v - m) / sd).collect());
            scales.push(sd);
        }
    }
    let lambda = design.groups().iter().map(|&g| spec.lambda_for(g)).collect();
    let eta = design.groups().iter().map(|&g| spec.eta_for(g)).collect();
    StandardizedProblem { n, p, xs, yc, scales, lambda, eta }
}

impl StandardizedProblem {
    pub fn objective(&self, w: &[f64]) -> f64 {
        let nf = self.n as f64;
        let mut rss = 0.0;
        for i in 0..self.n {
            let mut r = self.yc[i];
            for j in 0..self.p {
                r -= w[j] * self.xs[j][i];
            }
            rss += r * r;
        }
        let mut obj = rss / (2.0 * nf);
        for j in 0..self.p {
            obj += self.lambda[j] * w[j].abs() + self.eta[j] * w[j] * w[j];
        }
        obj
    }

    fn gradient_smooth(&self, w: &[f64], out: &mut [f64]) {
        let nf = self.n as f64;
        let mut r = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = self.yc[i];
            for j in 0..self.p {
                acc -= w[j] * self.xs[j][i];
            }
            r[i] = acc;
        }
        for j in 0..self.p {
            let mut g = 0.0;
            for i in 0..self.n {
                g += self.xs[j][i] * r[i];
            }
            out[j] = -g / nf + 2.0 * self.eta[j] * w[j];
        }
    }

    /// Power-iteration bound on the Lipschitz constant of the smooth part.
    fn lipschitz(&self) -> f64 {
        let nf = self.n as f64;
        let mut v = vec![1.0; self.p];
        let mut norm = (self.p as f64).sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
        let mut lam = 0.0;
        for _ in 0..60 {
            // u = (1/n) X' X v
            let mut xv = vec![0.0; self.n];
            for j in 0..self.p {
                if v[j] != 0.0 {
                    for i in 0..self.n {
                        xv[i] += self.xs[j][i] * v[j];
                    }
                }
            }
            let mut u = vec![0.0; self.p];
            for j in 0..self.p {
                let mut acc = 0.0;
                for i in 0..self.n {
                    acc += self.xs[j][i] * xv[i];
                }
                u[j] = acc / nf;
            }
            norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            lam = norm;
            for j in 0..self.p {
                v[j] = u[j] / norm;
            }
        }
        let max_eta = self.eta.iter().cloned().fold(0.0, f64::max);
        (lam + 2.0 * max_eta) * 1.02 + 1e-12
    }
}

fn soft(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Exact minimizer of the standardized objective when no L1 term is
/// present: the ridge normal equations in closed form.
fn ridge_exact_objective(prob: &StandardizedProblem) -> f64 {
    let nf = prob.n as f64;
    let active: Vec<usize> = (0..prob.p).filter(|&j| prob.scales[j] > 0.0).collect();
    let k = active.len();
    if k == 0 {
        return prob.objective(&vec![0.0; prob.p]);
    }
    let mut a = DMatrix::zeros(k, k);
    let mut b = DVector::zeros(k);
    for (ri, &j) in active.iter().enumerate() {
        let xj = &prob.xs[j];
        b[ri] = xj.iter().zip(&prob.yc).map(|(x, y)| x * y).sum::<f64>() / nf;
        for (ci, &l) in active.iter().enumerate() {
            let dot: f64 = xj.iter().zip(&prob.xs[l]).map(|(x, y)| x * y).sum();
            a[(ri, ci)] = dot / nf;
        }
        a[(ri, ri)] += 2.0 * prob.eta[j];
    }
    let sol = a.lu().solve(&b).expect("ridge system solvable");
    let mut w = vec![0.0; prob.p];
    for (ri, &j) in active.iter().enumerate() {
        w[j] = sol[ri];
    }
    prob.objective(&w)
}

/// Independent objective-value oracle: closed-form ridge when the spec has
/// no L1 penalty, otherwise FISTA with adaptive restart run until the
/// objective stops improving at 1e-12 relative. Returns the best objective
/// value seen.
pub fn proximal_gradient_objective(design: &DesignMatrix, spec: &PenaltySpec) -> f64 {
    let prob = standardize_problem(design, spec);
    if prob.lambda.iter().all(|&l| l == 0.0) && prob.eta.iter().any(|&e| e > 0.0) {
        return ridge_exact_objective(&prob);
    }
    let p = prob.p;
    let step = 1.0 / prob.lipschitz();
    let mut w = vec![0.0; p];
    let mut z = w.clone();
    let mut t = 1.0f64;
    let mut grad = vec![0.0; p];
    let mut best = prob.objective(&w);
    let mut prev = best;
    let mut small_changes = 0;
    for _ in 0..300_000 {
        prob.gradient_smooth(&z, &mut grad);
        let mut w_next = vec![0.0; p];
        for j in 0..p {
            if prob.scales[j] == 0.0 {
                continue;
            }
            w_next[j] = soft(z[j] - step * grad[j], step * prob.lambda[j]);
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        // adaptive restart on loss of momentum alignment
        let mut restart = 0.0;
        for j in 0..p {
            restart += (z[j] - w_next[j]) * (w_next[j] - w[j]);
        }
        let mut z_next = vec![0.0; p];
        if restart > 0.0 {
            z_next.copy_from_slice(&w_next);
            t = 1.0;
        } else {
            let m = (t - 1.0) / t_next;
            for j in 0..p {
                z_next[j] = w_next[j] + m * (w_next[j] - w[j]);
            }
            t = t_next;
        }
        w = w_next;
        z = z_next;
        let obj = prob.objective(&w);
        if obj < best {
            best = obj;
        }
        if (prev - obj).abs() <= 1e-13 * prev.abs().max(1.0) {
            small_changes += 1;
            if small_changes >= 12 {
                break;
            }
        } else {
            small_changes = 0;
        }
        prev = obj;
    }

    // polish: solve the stationarity system exactly on the detected
    // support and signs; the result is a feasible point, so the smaller
    // objective of the two is still a valid upper bound on the minimum
    let support: Vec<usize> = (0..p).filter(|&j| w[j] != 0.0).collect();
    if !support.is_empty() {
        let nf = prob.n as f64;
        let k = support.len();
        let mut a = DMatrix::zeros(k, k);
        let mut b = DVector::zeros(k);
        for (ri, &j) in support.iter().enumerate() {
            let xj = &prob.xs[j];
            let xy: f64 = xj.iter().zip(&prob.yc).map(|(x, y)| x * y).sum();
            b[ri] = xy / nf - prob.lambda[j] * w[j].signum();
            for (ci, &l) in support.iter().enumerate() {
                let dot: f64 = xj.iter().zip(&prob.xs[l]).map(|(x, y)| x * y).sum();
                a[(ri, ci)] = dot / nf;
            }
            a[(ri, ri)] += 2.0 * prob.eta[j];
        }
        if let Some(sol) = a.lu().solve(&b) {
            let mut polished = vec![0.0; p];
            for (ri, &j) in support.iter().enumerate() {
                polished[j] = sol[ri];
            }
            best = best.min(prob.objective(&polished));
        }
    }
    best
}

/// Dense least squares via normal equations with a tiny ridge for
/// conditioning; returns (intercept, coefficients).
pub fn dense_least_squares(design: &DesignMatrix) -> (f64, Vec<f64>) {
    let n = design.n_rows();
    let p = design.n_cols();
    let mut x = DMatrix::zeros(n, p + 1);
    for i in 0..n {
        x[(i, 0)] = 1.0;
    }
    for j in 0..p {
        let col = design.column(j);
        for i in 0..n {
            x[(i, j + 1)] = col[i];
        }
    }
    let y = DVector::from_column_slice(design.response());
    let mut a = x.transpose() * &x;
    for i in 0..p + 1 {
        a[(i, i)] += 1e-12;
    }
    let b = x.transpose() * y;
    let sol = a.lu().solve(&b).expect("normal equations solvable with ridge");
    (sol[0], sol.as_slice()[1..].to_vec())
}

/// Explicit joint-Gaussian conditioning of the activity level on the
/// search vector: builds the (K+1)-dimensional joint law implied by the
/// generative assumptions and conditions by brute force.
pub fn gaussian_conditional_oracle(
    mu_y: f64,
    alpha: &[f64],
    sigma2: f64,
    mu_x: &[f64],
    beta: &[f64],
    q: &DMatrix<f64>,
    y_lags: &[f64],
    x_t: &[f64],
) -> (f64, f64) {
    let k = beta.len();
    let m0 = mu_y + alpha.iter().zip(y_lags).map(|(a, y)| a * y).sum::<f64>();
    let beta_v = DVector::from_column_slice(beta);
    let cov_xx = q + &beta_v * beta_v.transpose() * sigma2;
    let cov_yx = beta_v.transpose() * sigma2; // 1 x K
    let mean_x = DVector::from_column_slice(mu_x) + &beta_v * m0;
    let inv = cov_xx.try_inverse().expect("joint covariance invertible");
    let dev = DVector::from_column_slice(x_t) - mean_x;
    let mean = m0 + (&cov_yx * &inv * dev)[(0, 0)];
    let var = sigma2 - (&cov_yx * &inv * cov_yx.transpose())[(0, 0)];
    let _ = k;
    (mean, var)
}

/// Random regression instance with a sparse planted signal and noise.
pub fn random_instance(seed: u64, n: usize, p: usize) -> DesignMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_lag = (p / 3).max(1).min(p);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    // a shared factor induces column correlation
    let factor: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    for _ in 0..p {
        let load: f64 = rng.gen_range(-0.8..0.8);
        cols.push(
            (0..n)
                .map(|i| load * factor[i] + rng.gen_range(-1.0..1.0))
                .collect(),
        );
    }
    let k_active = 3.min(p);
    let mut y: Vec<f64> = (0..n).map(|_| 0.3 * rng.gen_range(-1.0..1.0)).collect();
    for j in 0..k_active {
        let coef = rng.gen_range(-1.5..1.5);
        for i in 0..n {
            y[i] += coef * cols[j * (p / k_active).max(1) % p][i];
        }
    }
    let groups: Vec<Group> =
        (0..p).map(|j| if j < n_lag { Group::Lag } else { Group::Exo }).collect();
    DesignMatrix::from_columns(cols, groups, y).expect("valid random instance")
}

/// Random spec of the given regime with penalties anchored below the
/// all-zero threshold.
pub fn random_spec(seed: u64, design: &DesignMatrix, regime_idx: usize) -> PenaltySpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7370_6563);
    let lmax = argo::solver::lambda_max(design).max(1e-6);
    let mut draw = |lo: f64, hi: f64| lmax * 10f64.powf(-rng.gen_range(lo..hi));
    match regime_idx % 5 {
        0 => PenaltySpec::same_l1(draw(0.3, 2.5)),
        1 => PenaltySpec::separate_l1(draw(0.3, 2.5), draw(0.3, 2.5)),
        2 => PenaltySpec::same_l2(draw(0.3, 2.5)),
        3 => PenaltySpec::separate_l2(draw(0.3, 2.5), draw(0.3, 2.5)),
        _ => PenaltySpec::same_elastic_net(draw(0.3, 2.5), draw(0.5, 2.5)),
    }
}
