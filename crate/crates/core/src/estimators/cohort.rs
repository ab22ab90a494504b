//! Cohort estimators of Ψ: the multiplicative difference-in-differences
//! estimators (outcome-modeling and IPW forms), naive standardization
//! comparators, and the universal difference-in-differences (UDiD) doubly
//! robust estimator.

use nalgebra::{DMatrix, DVector};

use crate::data::{CohortDataset, TriOutcome};
use crate::design::DesignSpec;
use crate::error::{Error, Result};
use crate::numerics::newton_solve;
use crate::estimators::{EstimateResult, NuisanceDiagnostic};
use crate::glm::{fit_logistic, fit_multinomial3, FittedGlm};
use crate::stats::expit;

/// How the outcome-odds ratio `μ_{2,0}(X)/μ_{1,0}(X)` is estimated for the
/// DiD outcome-modeling estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DidRatioModel {
    /// Logistic regression of `1(Y=2)` on `(1,X)` among `V=0, Y≠0`; the
    /// fitted odds equal the ratio. Makes the saturated TND/cohort equality
    /// exact.
    #[default]
    ConditionalLogit,
    /// Full multinomial fit of `Y` on `(1,X)` among `V=0`; ratio of the
    /// class-2 and class-1 probabilities.
    Multinomial,
}

fn check_nonempty(data: &CohortDataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::DegenerateData("empty cohort dataset".into()));
    }
    Ok(())
}

fn subset_design(
    data: &CohortDataset,
    design: &DesignSpec,
    keep: impl Fn(&crate::data::CohortRecord) -> bool,
) -> (DMatrix<f64>, Vec<usize>) {
    let rows: Vec<usize> = data
        .records()
        .iter()
        .enumerate()
        .filter(|(_, r)| keep(r))
        .map(|(i, _)| i)
        .collect();
    let mut m = DMatrix::zeros(rows.len(), design.width());
    let mut row = vec![0.0; design.width()];
    for (k, &i) in rows.iter().enumerate() {
        let r = &data.records()[i];
        design.fill_row(&r.x, f64::from(r.v), &mut row);
        for j in 0..design.width() {
            m[(k, j)] = row[j];
        }
    }
    (m, rows)
}

/// Fit the outcome-odds-ratio nuisance `r(X) = μ_{2,0}(X)/μ_{1,0}(X)` and
/// return a per-record evaluator.
fn fit_did_ratio(
    data: &CohortDataset,
    design: &DesignSpec,
    model: DidRatioModel,
) -> Result<(FittedGlm, Box<dyn Fn(&[f64]) -> f64>)> {
    let design = design.clone();
    match model {
        DidRatioModel::ConditionalLogit => {
            let (x, rows) = subset_design(data, &design, |r| !r.v && r.y.tested());
            if rows.is_empty() {
                return Err(Error::DegenerateData("no unvaccinated tested subjects".into()));
            }
            let y: Vec<f64> = rows
                .iter()
                .map(|&i| f64::from(data.records()[i].y == TriOutcome::TestPositive))
                .collect();
            let fit = fit_logistic(&x, &y, None)?;
            let coef = fit.coefficients().clone();
            let eval = move |xr: &[f64]| {
                let row = design.row(xr, 0.0);
                let lp: f64 = coef.iter().zip(&row).map(|(c, v)| c * v).sum();
                lp.exp()
            };
            Ok((fit, Box::new(eval) as Box<dyn Fn(&[f64]) -> f64>))
        }
        DidRatioModel::Multinomial => {
            let (x, rows) = subset_design(data, &design, |r| !r.v);
            if rows.is_empty() {
                return Err(Error::DegenerateData("no unvaccinated subjects".into()));
            }
            let y: Vec<u8> = rows.iter().map(|&i| data.records()[i].y.code()).collect();
            let fit = fit_multinomial3(&x, &y)?;
            let fit_for_eval = fit.clone();
            let eval = move |xr: &[f64]| {
                let row = design.row(xr, 0.0);
                let p = fit_for_eval.predict_prob3(&row).expect("design width fixed");
                p[2] / p[1]
            };
            Ok((fit, Box::new(eval) as Box<dyn Fn(&[f64]) -> f64>))
        }
    }
}

/// DiD outcome-modeling estimator:
/// Ψ̂ = Σ V·1(Y=2) / Σ V·1(Y=1)·μ̂_{2,0}(X)/μ̂_{1,0}(X).
pub fn estimate_cohort_did_om(data: &CohortDataset, spec: &DesignSpec) -> Result<EstimateResult> {
    estimate_cohort_did_om_with(data, spec, DidRatioModel::default())
}

/// DiD outcome-modeling estimator with an explicit ratio-model choice.
pub fn estimate_cohort_did_om_with(
    data: &CohortDataset,
    spec: &DesignSpec,
    model: DidRatioModel,
) -> Result<EstimateResult> {
    check_nonempty(data)?;
    spec.validate(data.covariate_dim())?;
    let design = DesignSpec::x_only_over(&spec.covariate_indices());
    let (fit, ratio) = fit_did_ratio(data, &design, model)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for r in data.records() {
        if r.v {
            match r.y {
                TriOutcome::TestPositive => num += 1.0,
                TriOutcome::TestNegative => den += ratio(&r.x),
                TriOutcome::NotTested => {}
            }
        }
    }
    if num == 0.0 {
        return Err(Error::DegenerateEstimand("no vaccinated test-positives".into()));
    }
    if den == 0.0 {
        return Err(Error::DegenerateEstimand("no vaccinated test-negatives".into()));
    }
    Ok(EstimateResult::new("cohort-did-om", num / den, data.len())?
        .with_diagnostics(vec![NuisanceDiagnostic::from_glm("outcome-ratio", &fit)]))
}

/// DiD IPW estimator:
/// Ψ̂ = Σ V·1(Y=2) / Σ (1−V)·1(Y=2)·π̂_1(X)/(1−π̂_1(X)),
/// with `π_1(X) = Pr[V=1 | Y=1, X]` fitted among test-negatives.
pub fn estimate_cohort_did_ipw(data: &CohortDataset, spec: &DesignSpec) -> Result<EstimateResult> {
    check_nonempty(data)?;
    spec.validate(data.covariate_dim())?;
    let design = DesignSpec::x_only_over(&spec.covariate_indices());
    let (x, rows) = subset_design(data, &design, |r| r.y == TriOutcome::TestNegative);
    if rows.is_empty() {
        return Err(Error::DegenerateData("no test-negative subjects".into()));
    }
    let v: Vec<f64> = rows.iter().map(|&i| f64::from(data.records()[i].v)).collect();
    let fit = fit_logistic(&x, &v, None)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for r in data.records() {
        if r.y == TriOutcome::TestPositive {
            if r.v {
                num += 1.0;
            } else {
                let pi = fit.predict_prob(&design.row(&r.x, 0.0))?;
                den += pi / (1.0 - pi);
            }
        }
    }
    if num == 0.0 {
        return Err(Error::DegenerateEstimand("no vaccinated test-positives".into()));
    }
    if den == 0.0 {
        return Err(Error::DegenerateEstimand("no unvaccinated test-positives".into()));
    }
    Ok(EstimateResult::new("cohort-did-ipw", num / den, data.len())?
        .with_diagnostics(vec![NuisanceDiagnostic::from_glm("propensity-model", &fit)]))
}

/// Naive standardization comparator:
/// Ψ̂ = Σ_i μ̂_1(X_i) / Σ_i μ̂_0(X_i), with `μ_v(X) = Pr[Y=2 | V=v, X]` from a
/// multinomial fit on `(1, V, X_sub, V·X_sub)` and the sums running over the
/// full sample. `covariate_subset` selects the adjustment set.
pub fn estimate_standardized(
    data: &CohortDataset,
    spec: &DesignSpec,
    covariate_subset: &[usize],
) -> Result<EstimateResult> {
    check_nonempty(data)?;
    spec.validate(data.covariate_dim())?;
    for &c in covariate_subset {
        if c >= data.covariate_dim() {
            return Err(Error::DimensionMismatch(format!(
                "covariate subset references column {c} of a dimension-{} dataset",
                data.covariate_dim()
            )));
        }
    }
    let design = DesignSpec::interactions_over(covariate_subset);
    let (x, _) = subset_design(data, &design, |_| true);
    let y: Vec<u8> = data.records().iter().map(|r| r.y.code()).collect();
    let fit = fit_multinomial3(&x, &y)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for r in data.records() {
        let p1 = fit.predict_prob3(&design.row(&r.x, 1.0))?;
        let p0 = fit.predict_prob3(&design.row(&r.x, 0.0))?;
        num += p1[2];
        den += p0[2];
    }
    Ok(EstimateResult::new("cohort-standardized", num / den, data.len())?
        .with_diagnostics(vec![NuisanceDiagnostic::from_glm("outcome-multinomial", &fit)]))
}

/// Fitted UDiD nuisance bundle.
///
/// `beta_dr` are the coefficients of the generalized odds-ratio function
/// `β(y, X) = 1(y≠0)·(1,X)'b` (so `β(0, X) = 0` by construction), and
/// `eta_dr` the coefficients of `η(X) = log odds of V given Y⁰ = 0` after the
/// re-estimation step.
#[derive(Debug, Clone)]
pub struct UdidNuisance {
    pub mu_dagger: FittedGlm,
    pub pi_dagger: FittedGlm,
    pub eta_init: DVector<f64>,
    pub beta_dr: DVector<f64>,
    pub eta_dr: DVector<f64>,
    design: DesignSpec,
}

impl UdidNuisance {
    /// `(1,X)` evaluation row used by every UDiD component.
    fn row(&self, x: &[f64]) -> Vec<f64> {
        self.design.row(x, 0.0)
    }

    /// Class probabilities of Y under V=0 at `x` from the working model.
    pub fn mu0_probs(&self, x: &[f64]) -> Result<[f64; 3]> {
        self.mu_dagger.predict_prob3(&self.row(x))
    }

    /// `β_DR(y, x)`; zero at the reference level `y = 0`.
    pub fn beta(&self, y: TriOutcome, x: &[f64]) -> f64 {
        if y == TriOutcome::NotTested {
            0.0
        } else {
            let row = self.row(x);
            self.beta_dr.iter().zip(&row).map(|(c, v)| c * v).sum()
        }
    }

    /// `η_DR(x)`.
    pub fn eta(&self, x: &[f64]) -> f64 {
        let row = self.row(x);
        self.eta_dr.iter().zip(&row).map(|(c, v)| c * v).sum()
    }

    /// `ξ(x) = exp(β(1,x))·μ̂_2(0,x) / E[exp(β(Y,x)) | V=0, x]`.
    pub fn xi(&self, x: &[f64]) -> Result<f64> {
        let p = self.mu0_probs(x)?;
        let eb = self.beta(TriOutcome::TestNegative, x).exp();
        Ok(eb * p[2] / (p[0] + (p[1] + p[2]) * eb))
    }
}

/// Normalization residual `E[(1,X)'{(1−V)/(1−π(Y,X)) − 1}]` used in UDiD
/// steps 3 and 5, where `1/(1−π) = 1 + exp(η(X) + β(Y,X))`.
fn udid_normalization_residual(
    data: &CohortDataset,
    design: &DesignSpec,
    eta: &DVector<f64>,
    log_odds_tested: &dyn Fn(usize, &[f64]) -> f64,
) -> DVector<f64> {
    let dim = design.width();
    let mut resid = DVector::zeros(dim);
    let n = data.len() as f64;
    let mut row = vec![0.0; dim];
    for (i, r) in data.records().iter().enumerate() {
        design.fill_row(&r.x, 0.0, &mut row);
        let inv = if r.v {
            0.0
        } else {
            let lo = if r.y.tested() {
                log_odds_tested(i, &r.x)
            } else {
                eta.iter().zip(&row).map(|(c, v)| c * v).sum()
            };
            1.0 + lo.exp()
        };
        for j in 0..dim {
            resid[j] += (inv - 1.0) * row[j] / n;
        }
    }
    resid
}

const UDID_TOL: f64 = 1e-12;

/// Fit the UDiD nuisance bundle: working outcome model, extended propensity
/// at `Y=1`, the initial normalization for `η†`, the doubly robust solve for
/// `β_DR`, and the re-normalization for `η_DR`.
pub fn fit_udid_nuisance(data: &CohortDataset, spec: &DesignSpec) -> Result<UdidNuisance> {
    check_nonempty(data)?;
    spec.validate(data.covariate_dim())?;
    let design = DesignSpec::x_only_over(&spec.covariate_indices());
    let dim = design.width();

    // step 1: multinomial outcome working model among the unvaccinated
    for class in [TriOutcome::NotTested, TriOutcome::TestNegative, TriOutcome::TestPositive] {
        if !data.records().iter().any(|r| !r.v && r.y == class) {
            return Err(Error::DegenerateData(format!(
                "UDiD step 1: outcome class {} absent among the unvaccinated",
                class.code()
            )));
        }
    }
    let (x0, rows0) = subset_design(data, &design, |r| !r.v);
    let y0: Vec<u8> = rows0.iter().map(|&i| data.records()[i].y.code()).collect();
    let mu_dagger = fit_multinomial3(&x0, &y0)?;

    // step 2: extended propensity among test-negatives
    let (x1, rows1) = subset_design(data, &design, |r| r.y == TriOutcome::TestNegative);
    if rows1.is_empty() {
        return Err(Error::DegenerateData("UDiD step 2: no test-negative subjects".into()));
    }
    let v1: Vec<f64> = rows1.iter().map(|&i| f64::from(data.records()[i].v)).collect();
    let pi_dagger = fit_logistic(&x1, &v1, None)?;
    let pi_coef = pi_dagger.coefficients().clone();
    let design_pi = design.clone();
    let pi_log_odds = move |_: usize, x: &[f64]| -> f64 {
        let row = design_pi.row(x, 0.0);
        pi_coef.iter().zip(&row).map(|(c, v)| c * v).sum()
    };

    // step 3: normalize to find eta-dagger
    let f3 = |eta: &DVector<f64>| udid_normalization_residual(data, &design, eta, &pi_log_odds);
    let eta_init = newton_solve(&f3, DVector::zeros(dim), UDID_TOL, 200, "UDiD step 3")?;

    // step 4: doubly robust solve for the odds-ratio function, instruments
    // (1,X), restricted by S(Y,X) = 1(Y=1)
    let mu_for_step4 = mu_dagger.clone();
    let design_c = design.clone();
    let eta_for_step4 = eta_init.clone();
    let f4 = |b: &DVector<f64>| {
        let mut resid = DVector::zeros(dim);
        let n = data.len() as f64;
        let mut row = vec![0.0; dim];
        for r in data.records() {
            if r.y != TriOutcome::TestNegative {
                continue;
            }
            design_c.fill_row(&r.x, 0.0, &mut row);
            let v = f64::from(r.v);
            let eta_x: f64 = eta_for_step4.iter().zip(&row).map(|(c, val)| c * val).sum();
            let beta: f64 = b.iter().zip(&row).map(|(c, val)| c * val).sum();
            let p = mu_for_step4.predict_prob3(&row).expect("design width fixed");
            let w = (v - expit(eta_x)) * (-beta * v).exp() * (1.0 - p[1]) / n;
            for j in 0..dim {
                resid[j] += w * row[j];
            }
        }
        resid
    };
    let beta_dr = newton_solve(&f4, DVector::zeros(dim), UDID_TOL, 200, "UDiD step 4")?;

    // step 5: re-normalize eta with the doubly robust beta
    let design_e = design.clone();
    let beta_for_step5 = beta_dr.clone();
    // beta part of the tested-record log odds; step 5 adds eta(X) on top
    let beta_log_odds = move |_: usize, x: &[f64]| -> f64 {
        let row = design_e.row(x, 0.0);
        beta_for_step5.iter().zip(&row).map(|(c, v)| c * v).sum()
    };
    let design_f5 = design.clone();
    let f5 = |eta: &DVector<f64>| {
        let log_odds = |i: usize, x: &[f64]| -> f64 {
            let row = design_f5.row(x, 0.0);
            let eta_x: f64 = eta.iter().zip(&row).map(|(c, v)| c * v).sum();
            eta_x + beta_log_odds(i, x)
        };
        udid_normalization_residual(data, &design, eta, &log_odds)
    };
    let eta_dr = newton_solve(&f5, eta_init.clone(), UDID_TOL, 200, "UDiD step 5")?;

    Ok(UdidNuisance { mu_dagger, pi_dagger, eta_init, beta_dr, eta_dr, design })
}

/// UDiD doubly robust estimator (steps 1–6):
/// Ψ̂ = Σ V·1(Y=2) / Σ [(1−V)·e^{η(X)+β(Y,X)}·(1(Y=2) − ξ(X)) + V·ξ(X)].
pub fn estimate_cohort_udid_dr(data: &CohortDataset, spec: &DesignSpec) -> Result<EstimateResult> {
    let nuis = fit_udid_nuisance(data, spec)?;
    estimate_cohort_udid_dr_with(data, &nuis)
}

pub(crate) fn estimate_cohort_udid_dr_with(
    data: &CohortDataset,
    nuis: &UdidNuisance,
) -> Result<EstimateResult> {
    let mut num = 0.0;
    let mut den = 0.0;
    for r in data.records() {
        let xi = nuis.xi(&r.x)?;
        if r.v {
            if r.y == TriOutcome::TestPositive {
                num += 1.0;
            }
            den += xi;
        } else {
            let w = (nuis.eta(&r.x) + nuis.beta(r.y, &r.x)).exp();
            den += w * (f64::from(r.y == TriOutcome::TestPositive) - xi);
        }
    }
    if num == 0.0 {
        return Err(Error::DegenerateEstimand("no vaccinated test-positives".into()));
    }
    if den <= 0.0 {
        return Err(Error::DegenerateEstimand(format!(
            "UDiD denominator is nonpositive ({den})"
        )));
    }
    let mut result = EstimateResult::new("cohort-udid-dr", num / den, data.len())?;
    result.diagnostics = vec![
        NuisanceDiagnostic::from_glm("outcome-multinomial", &nuis.mu_dagger),
        NuisanceDiagnostic::from_glm("extended-propensity", &nuis.pi_dagger),
    ];
    Ok(result)
}
