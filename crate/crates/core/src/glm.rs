//! Nuisance-model fitting: binary logistic and 3-category (baseline-0)
//! multinomial logistic regression, by Newton–Raphson with step-halving.
//!
//! Convergence means the score (gradient of the log-likelihood) has max
//! absolute component at most [`SCORE_TOL`]. Separation is reported as an
//! error rather than silently clamped: downstream odds must stay finite.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::stats::{clamp_prob, expit};

/// Absolute score tolerance at the returned coefficients.
pub const SCORE_TOL: f64 = 1e-10;
/// Iteration cap for Newton.
pub const MAX_ITER: usize = 50;
/// Coefficient magnitude treated as diverging; checked both on convergence
/// failure and at score-converged solutions (true separation drives the score
/// to zero at unbounded coefficients).
const SEPARATION_COEF: f64 = 30.0;

/// Model family of a [`FittedGlm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Binomial,
    /// Three outcome categories {0,1,2} with baseline category 0;
    /// coefficients are stacked `[class-1 block, class-2 block]`.
    Multinomial3,
}

/// A fitted logistic or multinomial model.
#[derive(Debug, Clone)]
pub struct FittedGlm {
    coefficients: DVector<f64>,
    converged: bool,
    iterations: usize,
    loglik: f64,
    family: Family,
    width: usize,
}

impl FittedGlm {
    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coefficients
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn loglik(&self) -> f64 {
        self.loglik
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Design-row width (per class for multinomial).
    pub fn width(&self) -> usize {
        self.width
    }

    /// Linear predictor for a binary model.
    pub fn linear_predictor(&self, row: &[f64]) -> Result<f64> {
        if self.family != Family::Binomial || row.len() != self.width {
            return Err(Error::DimensionMismatch(format!(
                "row width {} against model width {}",
                row.len(),
                self.width
            )));
        }
        Ok(dot(self.coefficients.as_slice(), row))
    }

    /// Predicted probability for a binary model, clamped away from 0/1.
    pub fn predict_prob(&self, row: &[f64]) -> Result<f64> {
        Ok(clamp_prob(expit(self.linear_predictor(row)?)))
    }

    /// Predicted class probabilities (classes 0,1,2) for a multinomial model.
    /// The triple sums to one before clamping.
    pub fn predict_prob3(&self, row: &[f64]) -> Result<[f64; 3]> {
        if self.family != Family::Multinomial3 || row.len() != self.width {
            return Err(Error::DimensionMismatch(format!(
                "row width {} against multinomial model width {}",
                row.len(),
                self.width
            )));
        }
        let p = self.width;
        let eta1 = dot(&self.coefficients.as_slice()[..p], row);
        let eta2 = dot(&self.coefficients.as_slice()[p..], row);
        let m = 0f64.max(eta1).max(eta2);
        let e0 = (-m).exp();
        let e1 = (eta1 - m).exp();
        let e2 = (eta2 - m).exp();
        let den = e0 + e1 + e2;
        Ok([clamp_prob(e0 / den), clamp_prob(e1 / den), clamp_prob(e2 / den)])
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// log(1 + e^z) without overflow.
#[inline]
fn ln_1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Log-likelihood of a binary logistic model.
pub fn loglik_binomial(x: &DMatrix<f64>, y: &[f64], weights: Option<&[f64]>, beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    let mut ll = 0.0;
    for i in 0..x.nrows() {
        let w = weights.map_or(1.0, |w| w[i]);
        ll += w * (y[i] * eta[i] - ln_1p_exp(eta[i]));
    }
    ll
}

/// Score (gradient) of a binary logistic model.
pub fn score_binomial(
    x: &DMatrix<f64>,
    y: &[f64],
    weights: Option<&[f64]>,
    beta: &DVector<f64>,
) -> DVector<f64> {
    let eta = x * beta;
    let mut g = DVector::zeros(x.ncols());
    for i in 0..x.nrows() {
        let w = weights.map_or(1.0, |w| w[i]);
        let r = w * (y[i] - expit(eta[i]));
        for j in 0..x.ncols() {
            g[j] += r * x[(i, j)];
        }
    }
    g
}

fn check_shapes(x: &DMatrix<f64>, ny: usize, weights: Option<&[f64]>) -> Result<()> {
    if x.nrows() != ny {
        return Err(Error::DimensionMismatch(format!(
            "{} design rows against {} outcomes",
            x.nrows(),
            ny
        )));
    }
    if let Some(w) = weights {
        if w.len() != ny {
            return Err(Error::DimensionMismatch(format!(
                "{} weights against {} outcomes",
                w.len(),
                ny
            )));
        }
    }
    if x.nrows() < x.ncols() {
        return Err(Error::RankDeficient);
    }
    Ok(())
}

fn newton_failure(beta: &DVector<f64>) -> Error {
    if beta.amax() > SEPARATION_COEF {
        Error::Separation
    } else {
        Error::NotConverged { what: "logistic Newton iteration".into(), iterations: MAX_ITER }
    }
}

/// Maximum-likelihood binary logistic regression.
///
/// `y` must contain both classes and the design must have full column rank;
/// optional nonnegative case weights are supported.
pub fn fit_logistic(
    x: &DMatrix<f64>,
    y: &[f64],
    weights: Option<&[f64]>,
) -> Result<FittedGlm> {
    check_shapes(x, y.len(), weights)?;
    let has = |class: f64| {
        y.iter()
            .enumerate()
            .any(|(i, &yi)| yi == class && weights.map_or(1.0, |w| w[i]) > 0.0)
    };
    if !has(1.0) || !has(0.0) {
        return Err(Error::Separation);
    }

    let p = x.ncols();
    let mut beta = DVector::zeros(p);
    let mut ll = loglik_binomial(x, y, weights, &beta);
    for iter in 0..MAX_ITER {
        let g = score_binomial(x, y, weights, &beta);
        if g.amax() <= SCORE_TOL {
            if beta.amax() > SEPARATION_COEF {
                return Err(Error::Separation);
            }
            return Ok(FittedGlm {
                coefficients: beta,
                converged: true,
                iterations: iter,
                loglik: ll,
                family: Family::Binomial,
                width: p,
            });
        }
        // information matrix X' W X
        let mut info = DMatrix::zeros(p, p);
        let eta = x * &beta;
        for i in 0..x.nrows() {
            let mu = expit(eta[i]);
            let w = weights.map_or(1.0, |w| w[i]) * mu * (1.0 - mu);
            if w == 0.0 {
                continue;
            }
            for a in 0..p {
                let xa = x[(i, a)] * w;
                for b in a..p {
                    info[(a, b)] += xa * x[(i, b)];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                info[(a, b)] = info[(b, a)];
            }
        }
        let chol = Cholesky::new(info).ok_or(Error::RankDeficient)?;
        let step = chol.solve(&g);
        // step-halving on likelihood decrease
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let candidate = &beta + scale * &step;
            let cand_ll = loglik_binomial(x, y, weights, &candidate);
            if cand_ll + 1e-12 >= ll {
                beta = candidate;
                ll = cand_ll;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(newton_failure(&beta));
        }
    }
    let g = score_binomial(x, y, weights, &beta);
    if g.amax() <= SCORE_TOL && beta.amax() <= SEPARATION_COEF {
        let width = x.ncols();
        return Ok(FittedGlm {
            coefficients: beta,
            converged: true,
            iterations: MAX_ITER,
            loglik: ll,
            family: Family::Binomial,
            width,
        });
    }
    Err(newton_failure(&beta))
}

/// Log-likelihood of the baseline-category multinomial model.
pub fn loglik_multinomial3(x: &DMatrix<f64>, y: &[u8], theta: &DVector<f64>) -> f64 {
    let p = x.ncols();
    let mut ll = 0.0;
    for i in 0..x.nrows() {
        let row: Vec<f64> = (0..p).map(|j| x[(i, j)]).collect();
        let eta1 = dot(&theta.as_slice()[..p], &row);
        let eta2 = dot(&theta.as_slice()[p..], &row);
        let m = 0f64.max(eta1).max(eta2);
        let lse = m + ((-m).exp() + (eta1 - m).exp() + (eta2 - m).exp()).ln();
        ll += match y[i] {
            1 => eta1,
            2 => eta2,
            _ => 0.0,
        } - lse;
    }
    ll
}

/// Score of the baseline-category multinomial model.
pub fn score_multinomial3(x: &DMatrix<f64>, y: &[u8], theta: &DVector<f64>) -> DVector<f64> {
    let p = x.ncols();
    let mut g = DVector::zeros(2 * p);
    for i in 0..x.nrows() {
        let row: Vec<f64> = (0..p).map(|j| x[(i, j)]).collect();
        let eta1 = dot(&theta.as_slice()[..p], &row);
        let eta2 = dot(&theta.as_slice()[p..], &row);
        let m = 0f64.max(eta1).max(eta2);
        let e0 = (-m).exp();
        let e1 = (eta1 - m).exp();
        let e2 = (eta2 - m).exp();
        let den = e0 + e1 + e2;
        let p1 = e1 / den;
        let p2 = e2 / den;
        let d1 = f64::from(y[i] == 1) - p1;
        let d2 = f64::from(y[i] == 2) - p2;
        for j in 0..p {
            g[j] += d1 * row[j];
            g[p + j] += d2 * row[j];
        }
    }
    g
}

/// Maximum-likelihood 3-category multinomial logistic regression with
/// baseline category 0. All three classes must be present.
pub fn fit_multinomial3(x: &DMatrix<f64>, y: &[u8]) -> Result<FittedGlm> {
    check_shapes(x, y.len(), None)?;
    for class in 0..3u8 {
        if !y.contains(&class) {
            return Err(Error::Separation);
        }
    }
    let p = x.ncols();
    let mut theta = DVector::zeros(2 * p);
    let mut ll = loglik_multinomial3(x, y, &theta);
    for iter in 0..MAX_ITER {
        let g = score_multinomial3(x, y, &theta);
        if g.amax() <= SCORE_TOL {
            if theta.amax() > SEPARATION_COEF {
                return Err(Error::Separation);
            }
            return Ok(FittedGlm {
                coefficients: theta,
                converged: true,
                iterations: iter,
                loglik: ll,
                family: Family::Multinomial3,
                width: p,
            });
        }
        let mut info = DMatrix::zeros(2 * p, 2 * p);
        for i in 0..x.nrows() {
            let row: Vec<f64> = (0..p).map(|j| x[(i, j)]).collect();
            let eta1 = dot(&theta.as_slice()[..p], &row);
            let eta2 = dot(&theta.as_slice()[p..], &row);
            let m = 0f64.max(eta1).max(eta2);
            let e0 = (-m).exp();
            let e1 = (eta1 - m).exp();
            let e2 = (eta2 - m).exp();
            let den = e0 + e1 + e2;
            let p1 = e1 / den;
            let p2 = e2 / den;
            let w11 = p1 * (1.0 - p1);
            let w22 = p2 * (1.0 - p2);
            let w12 = -p1 * p2;
            for a in 0..p {
                for b in 0..p {
                    let xx = row[a] * row[b];
                    info[(a, b)] += w11 * xx;
                    info[(p + a, p + b)] += w22 * xx;
                    info[(a, p + b)] += w12 * xx;
                    info[(p + a, b)] += w12 * xx;
                }
            }
        }
        let chol = Cholesky::new(info).ok_or(Error::RankDeficient)?;
        let step = chol.solve(&g);
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let candidate = &theta + scale * &step;
            let cand_ll = loglik_multinomial3(x, y, &candidate);
            if cand_ll + 1e-12 >= ll {
                theta = candidate;
                ll = cand_ll;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(newton_failure(&theta));
        }
    }
    let g = score_multinomial3(x, y, &theta);
    if g.amax() <= SCORE_TOL && theta.amax() <= SEPARATION_COEF {
        return Ok(FittedGlm {
            coefficients: theta,
            converged: true,
            iterations: MAX_ITER,
            loglik: ll,
            family: Family::Multinomial3,
            width: p,
        });
    }
    Err(newton_failure(&theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::KeyedRng;
    use approx::assert_relative_eq;

    fn col(v: Vec<f64>) -> DVector<f64> {
        DVector::from_vec(v)
    }

    #[test]
    fn intercept_only_is_log_odds() {
        let x = DMatrix::from_element(4, 1, 1.0);
        let fit = fit_logistic(&x, &[1.0, 1.0, 1.0, 0.0], None).unwrap();
        assert_relative_eq!(fit.coefficients()[0], 3f64.ln(), epsilon = 1e-9);
        assert!(fit.converged());
    }

    #[test]
    fn balanced_intercept_is_zero() {
        let x = DMatrix::from_element(2, 1, 1.0);
        let fit = fit_logistic(&x, &[1.0, 0.0], None).unwrap();
        assert_relative_eq!(fit.coefficients()[0], 0.0, epsilon = 1e-12);
    }

    /// Independent oracle: gradient ascent with Barzilai-Borwein step sizes
    /// and a backtracking safeguard. No Newton steps, no information matrix.
    fn gradient_ascent<F, G>(dim: usize, loglik: F, score: G) -> DVector<f64>
    where
        F: Fn(&DVector<f64>) -> f64,
        G: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let mut x = DVector::zeros(dim);
        let mut ll = loglik(&x);
        let mut g = score(&x);
        let mut step = 1e-3;
        for _ in 0..500_000 {
            if g.amax() < 1e-11 {
                break;
            }
            let mut scale = step;
            let mut improved = false;
            for _ in 0..100 {
                let cand = &x + scale * &g;
                let cand_ll = loglik(&cand);
                if cand_ll >= ll {
                    let cand_g = score(&cand);
                    let dx = &cand - &x;
                    let dg = &cand_g - &g;
                    let denom = dg.dot(&dg);
                    step = if denom > 0.0 { (dx.dot(&dg) / denom).abs().max(1e-12) } else { scale };
                    x = cand;
                    ll = cand_ll;
                    g = cand_g;
                    improved = true;
                    break;
                }
                scale *= 0.5;
            }
            if !improved {
                break;
            }
        }
        x
    }

    fn gradient_ascent_logistic(x: &DMatrix<f64>, y: &[f64]) -> DVector<f64> {
        gradient_ascent(
            x.ncols(),
            |b| loglik_binomial(x, y, None, b),
            |b| score_binomial(x, y, None, b),
        )
    }

    fn random_logistic_instance(seed: u64, n: usize) -> (DMatrix<f64>, Vec<f64>) {
        let mut rng = KeyedRng::from_parts(&[seed]);
        let mut x = DMatrix::zeros(n, 3);
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            x[(i, 0)] = 1.0;
            x[(i, 1)] = rng.uniform() * 2.0 - 1.0;
            x[(i, 2)] = rng.standard_normal();
            let eta = 0.3 - 0.8 * x[(i, 1)] + 0.5 * x[(i, 2)];
            y.push(f64::from(rng.bernoulli(expit(eta))));
        }
        (x, y)
    }

    #[test]
    fn newton_matches_gradient_ascent_oracle() {
        let (x, y) = random_logistic_instance(3, 200);
        let fit = fit_logistic(&x, &y, None).unwrap();
        let oracle = gradient_ascent_logistic(&x, &y);
        for j in 0..3 {
            assert_relative_eq!(fit.coefficients()[j], oracle[j], epsilon = 1e-6);
        }
    }

    #[test]
    fn weighted_fit_equals_replicated_fit() {
        let (x, y) = random_logistic_instance(5, 60);
        // replicate row 0 three times vs weight 3
        let mut xr = DMatrix::zeros(62, 3);
        let mut yr = Vec::new();
        for i in 0..60 {
            for j in 0..3 {
                xr[(i, j)] = x[(i, j)];
            }
            yr.push(y[i]);
        }
        for k in 0..2 {
            for j in 0..3 {
                xr[(60 + k, j)] = x[(0, j)];
            }
            yr.push(y[0]);
        }
        let mut w = vec![1.0; 60];
        w[0] = 3.0;
        let fit_w = fit_logistic(&x, &y, Some(&w)).unwrap();
        let fit_r = fit_logistic(&xr, &yr, None).unwrap();
        for j in 0..3 {
            assert_relative_eq!(fit_w.coefficients()[j], fit_r.coefficients()[j], epsilon = 1e-7);
        }
    }

    #[test]
    fn score_matches_finite_differences() {
        let (x, y) = random_logistic_instance(9, 150);
        let fit = fit_logistic(&x, &y, None).unwrap();
        // evaluate away from the optimum so the gradient is nonzero
        let beta = fit.coefficients() * 0.7;
        let g = score_binomial(&x, &y, None, &beta);
        for j in 0..3 {
            let h = 1e-6 * beta[j].abs().max(1.0);
            let mut up = beta.clone();
            up[j] += h;
            let mut dn = beta.clone();
            dn[j] -= h;
            let fd = (loglik_binomial(&x, &y, None, &up) - loglik_binomial(&x, &y, None, &dn))
                / (2.0 * h);
            assert_relative_eq!(g[j], fd, max_relative = 1e-4);
        }
    }

    #[test]
    fn fitted_mean_equals_outcome_mean_with_intercept() {
        let (x, y) = random_logistic_instance(21, 120);
        let fit = fit_logistic(&x, &y, None).unwrap();
        let mean_fit: f64 = (0..120)
            .map(|i| {
                let row: Vec<f64> = (0..3).map(|j| x[(i, j)]).collect();
                fit.predict_prob(&row).unwrap()
            })
            .sum::<f64>()
            / 120.0;
        let mean_y: f64 = y.iter().sum::<f64>() / 120.0;
        assert_relative_eq!(mean_fit, mean_y, epsilon = 1e-9);
    }

    #[test]
    fn separation_is_reported() {
        // perfectly separated data
        let mut x = DMatrix::zeros(6, 2);
        let mut y = Vec::new();
        for i in 0..6 {
            x[(i, 0)] = 1.0;
            x[(i, 1)] = i as f64;
            y.push(f64::from(i >= 3));
        }
        match fit_logistic(&x, &y, None) {
            Err(Error::Separation) => {}
            other => panic!("expected separation, got {other:?}"),
        }
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let mut x = DMatrix::zeros(8, 2);
        for i in 0..8 {
            x[(i, 0)] = 1.0;
            x[(i, 1)] = 2.0; // collinear with intercept
        }
        let y = [1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        match fit_logistic(&x, &y, None) {
            Err(Error::RankDeficient) => {}
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn single_class_outcomes_error() {
        let x = DMatrix::from_element(5, 1, 1.0);
        assert!(matches!(fit_logistic(&x, &[1.0; 5], None), Err(Error::Separation)));
    }

    #[test]
    fn multinomial_intercepts_are_log_count_ratios() {
        let x = DMatrix::from_element(10, 1, 1.0);
        let y: Vec<u8> = [vec![0u8; 6], vec![1u8; 3], vec![2u8; 1]].concat();
        let fit = fit_multinomial3(&x, &y).unwrap();
        assert_relative_eq!(fit.coefficients()[0], (3f64 / 6.0).ln(), epsilon = 1e-8);
        assert_relative_eq!(fit.coefficients()[1], (1f64 / 6.0).ln(), epsilon = 1e-8);
    }

    #[test]
    fn multinomial_uniform_counts_give_zero_intercepts() {
        let x = DMatrix::from_element(3, 1, 1.0);
        let fit = fit_multinomial3(&x, &[0u8, 1, 2]).unwrap();
        assert_relative_eq!(fit.coefficients()[0], 0.0, epsilon = 1e-10);
        assert_relative_eq!(fit.coefficients()[1], 0.0, epsilon = 1e-10);
    }

    /// Independent multinomial oracle: same gradient ascent, multinomial
    /// log-likelihood.
    fn gradient_ascent_multinomial(x: &DMatrix<f64>, y: &[u8]) -> DVector<f64> {
        gradient_ascent(
            2 * x.ncols(),
            |t| loglik_multinomial3(x, y, t),
            |t| score_multinomial3(x, y, t),
        )
    }

    #[test]
    fn multinomial_matches_gradient_ascent_oracle() {
        let mut rng = KeyedRng::from_parts(&[31]);
        let n = 240;
        let mut x = DMatrix::zeros(n, 2);
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            x[(i, 0)] = 1.0;
            x[(i, 1)] = rng.uniform();
            let eta1 = -0.3 + 0.9 * x[(i, 1)];
            let eta2 = -1.0 + 0.4 * x[(i, 1)];
            let den = 1.0 + eta1.exp() + eta2.exp();
            let u = rng.uniform();
            let p1 = eta1.exp() / den;
            let p2 = eta2.exp() / den;
            y.push(if u < p1 {
                1u8
            } else if u < p1 + p2 {
                2u8
            } else {
                0u8
            });
        }
        let fit = fit_multinomial3(&x, &y).unwrap();
        let oracle = gradient_ascent_multinomial(&x, &y);
        for j in 0..4 {
            assert_relative_eq!(fit.coefficients()[j], oracle[j], epsilon = 1e-6);
        }
    }

    #[test]
    fn multinomial_score_matches_finite_differences() {
        let x = DMatrix::from_fn(60, 2, |i, j| if j == 0 { 1.0 } else { (i as f64) / 60.0 });
        let y: Vec<u8> = (0..60).map(|i| (i % 3) as u8).collect();
        let theta = col(vec![0.2, -0.4, -0.1, 0.3]);
        let g = score_multinomial3(&x, &y, &theta);
        for j in 0..4 {
            let h = 1e-6 * theta[j].abs().max(1.0);
            let mut up = theta.clone();
            up[j] += h;
            let mut dn = theta.clone();
            dn[j] -= h;
            let fd = (loglik_multinomial3(&x, &y, &up) - loglik_multinomial3(&x, &y, &dn))
                / (2.0 * h);
            assert_relative_eq!(g[j], fd, max_relative = 1e-4);
        }
    }

    #[test]
    fn multinomial_collapses_to_logistic_on_classes_1_2() {
        // intercept-only: implied log-odds of class 2 vs 1 equals the
        // logistic fit of 1(y=2) among y in {1,2}; both are empirical log odds
        let x = DMatrix::from_element(9, 1, 1.0);
        let y: Vec<u8> = [vec![0u8; 2], vec![1u8; 5], vec![2u8; 2]].concat();
        let multi = fit_multinomial3(&x, &y).unwrap();
        let implied = multi.coefficients()[1] - multi.coefficients()[0];
        let x12 = DMatrix::from_element(7, 1, 1.0);
        let y12: Vec<f64> = y.iter().filter(|&&c| c != 0).map(|&c| f64::from(c == 2)).collect();
        let binary = fit_logistic(&x12, &y12, None).unwrap();
        assert_relative_eq!(implied, binary.coefficients()[0], epsilon = 1e-8);
    }

    #[test]
    fn predictions_match_hand_arithmetic() {
        let x = DMatrix::from_element(4, 1, 1.0);
        let fit = fit_logistic(&x, &[1.0, 1.0, 1.0, 0.0], None).unwrap();
        assert_relative_eq!(fit.predict_prob(&[1.0]).unwrap(), 0.75, epsilon = 1e-9);

        let zero = FittedGlm {
            coefficients: col(vec![0.0, 0.0]),
            converged: true,
            iterations: 0,
            loglik: 0.0,
            family: Family::Binomial,
            width: 2,
        };
        assert_relative_eq!(zero.predict_prob(&[1.0, 3.0]).unwrap(), 0.5, epsilon = 1e-15);

        // multinomial intercepts (log 0.5, log(1/6)) give probabilities (0.6, 0.3, 0.1)
        let multi = FittedGlm {
            coefficients: col(vec![0.5f64.ln(), (1.0f64 / 6.0).ln()]),
            converged: true,
            iterations: 0,
            loglik: 0.0,
            family: Family::Multinomial3,
            width: 1,
        };
        let probs = multi.predict_prob3(&[1.0]).unwrap();
        assert_relative_eq!(probs[0], 0.6, epsilon = 1e-12);
        assert_relative_eq!(probs[1], 0.3, epsilon = 1e-12);
        assert_relative_eq!(probs[2], 0.1, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_in_prediction() {
        let x = DMatrix::from_element(4, 1, 1.0);
        let fit = fit_logistic(&x, &[1.0, 1.0, 0.0, 0.0], None).unwrap();
        assert!(matches!(fit.predict_prob(&[1.0, 2.0]), Err(Error::DimensionMismatch(_))));
    }
}
