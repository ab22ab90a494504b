//! TND estimators of Ψ: conventional logistic, outcome modeling, inverse
//! probability weighting, and the doubly robust odds-ratio-moment estimator.
//!
//! With no covariates all four collapse to the crude odds ratio
//! `(n11·n00)/(n10·n01)` of the V × Y* table.

use nalgebra::{DMatrix, DVector};

use crate::data::TndDataset;
use crate::design::DesignSpec;
use crate::error::{Error, Result};
use crate::numerics::{bisect_scalar, newton_solve};
use crate::estimators::{EstimateResult, NuisanceDiagnostic};
use crate::glm::{fit_logistic, FittedGlm};

/// Fitted nuisance models for the TND estimators: the pooled outcome model
/// `μ*_v(X) = Pr[Y*=1 | S=1, V=v, X]` on `(1,V,X,VX)` and the extended
/// propensity model `π*_0(X) = Pr[V=1 | S=1, Y*=0, X]` on `(1,X)` among
/// test-negative controls.
#[derive(Debug, Clone)]
pub struct NuisanceTnd {
    pub mu: FittedGlm,
    pub mu_design: DesignSpec,
    pub pi0: FittedGlm,
    pub pi_design: DesignSpec,
}

impl NuisanceTnd {
    /// μ*_0 prediction for one record.
    pub fn mu0(&self, x: &[f64]) -> Result<f64> {
        self.mu.predict_prob(&self.mu_design.row(x, 0.0))
    }

    /// π*_0 prediction for one record.
    pub fn pi0(&self, x: &[f64]) -> Result<f64> {
        self.pi0.predict_prob(&self.pi_design.row(x, 0.0))
    }
}

fn design_matrix(data: &TndDataset, design: &DesignSpec) -> DMatrix<f64> {
    let n = data.len();
    let w = design.width();
    let mut m = DMatrix::zeros(n, w);
    let mut row = vec![0.0; w];
    for (i, r) in data.records().iter().enumerate() {
        design.fill_row(&r.x, f64::from(r.v), &mut row);
        for j in 0..w {
            m[(i, j)] = row[j];
        }
    }
    m
}

fn check_nonempty(data: &TndDataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::DegenerateData("empty TND dataset".into()));
    }
    Ok(())
}

fn cell_counts(data: &TndDataset) -> [usize; 4] {
    // [v=1,y=1], [v=1,y=0], [v=0,y=1], [v=0,y=0]
    let mut c = [0usize; 4];
    for r in data.records() {
        let idx = match (r.v, r.y_star) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        c[idx] += 1;
    }
    c
}

/// Fit both TND nuisance models over the covariates referenced by `spec`.
pub fn fit_nuisance_tnd(data: &TndDataset, spec: &DesignSpec) -> Result<NuisanceTnd> {
    check_nonempty(data)?;
    spec.validate(data.covariate_dim())?;
    let cov = spec.covariate_indices();
    let mu_design = DesignSpec::interactions_over(&cov);
    let pi_design = DesignSpec::x_only_over(&cov);

    let x_mu = design_matrix(data, &mu_design);
    let y: Vec<f64> = data.records().iter().map(|r| f64::from(r.y_star)).collect();
    let mu = fit_logistic(&x_mu, &y, None)?;

    // propensity fit restricted to test-negative controls
    let controls: Vec<usize> = data
        .records()
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.y_star)
        .map(|(i, _)| i)
        .collect();
    if controls.is_empty() {
        return Err(Error::DegenerateData("no test-negative controls".into()));
    }
    let mut x_pi = DMatrix::zeros(controls.len(), pi_design.width());
    let mut v = Vec::with_capacity(controls.len());
    let mut row = vec![0.0; pi_design.width()];
    for (k, &i) in controls.iter().enumerate() {
        let r = &data.records()[i];
        pi_design.fill_row(&r.x, f64::from(r.v), &mut row);
        for j in 0..pi_design.width() {
            x_pi[(k, j)] = row[j];
        }
        v.push(f64::from(r.v));
    }
    let pi0 = fit_logistic(&x_pi, &v, None)?;

    Ok(NuisanceTnd { mu, mu_design, pi0, pi_design })
}

/// Conventional TND estimator: Ψ̂ = exp(γ̂_V) from the logistic regression of
/// `Y*` on the given design (by default `(1, V, X)`).
pub fn estimate_tnd_logit(data: &TndDataset, spec: &DesignSpec) -> Result<EstimateResult> {
    check_nonempty(data)?;
    spec.validate(data.covariate_dim())?;
    let counts = cell_counts(data);
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::DegenerateData(
            "a V x Y* cell is empty; the odds ratio is not estimable".into(),
        ));
    }
    let design = DesignSpec::main_effects_over(&spec.covariate_indices());
    let v_index = design.v_index().expect("main-effects design has a V term");
    let x = design_matrix(data, &design);
    let y: Vec<f64> = data.records().iter().map(|r| f64::from(r.y_star)).collect();
    let fit = fit_logistic(&x, &y, None)?;
    let psi = fit.coefficients()[v_index].exp();
    Ok(EstimateResult::new("tnd-logit", psi, data.len())?
        .with_diagnostics(vec![NuisanceDiagnostic::from_glm("outcome-logistic", &fit)]))
}

/// Outcome-modeling estimator:
/// Ψ̂ = Σ V·Y* / Σ V·(1−Y*)·μ̂*_0/(1−μ̂*_0).
pub fn estimate_tnd_om(data: &TndDataset, spec: &DesignSpec) -> Result<EstimateResult> {
    let nuis = fit_nuisance_tnd(data, spec)?;
    estimate_tnd_om_with(data, &nuis)
}

pub(crate) fn estimate_tnd_om_with(data: &TndDataset, nuis: &NuisanceTnd) -> Result<EstimateResult> {
    let mut num = 0.0;
    let mut den = 0.0;
    for r in data.records() {
        if r.v {
            if r.y_star {
                num += 1.0;
            } else {
                let mu0 = nuis.mu0(&r.x)?;
                den += mu0 / (1.0 - mu0);
            }
        }
    }
    if num == 0.0 {
        return Err(Error::DegenerateEstimand("no vaccinated test-positives".into()));
    }
    if den == 0.0 {
        return Err(Error::DegenerateEstimand("no vaccinated test-negatives".into()));
    }
    Ok(EstimateResult::new("tnd-om", num / den, data.len())?
        .with_diagnostics(vec![NuisanceDiagnostic::from_glm("outcome-model", &nuis.mu)]))
}

/// Inverse-probability-weighting estimator:
/// Ψ̂ = Σ V·Y* / Σ (1−V)·Y*·π̂*_0/(1−π̂*_0).
pub fn estimate_tnd_ipw(data: &TndDataset, spec: &DesignSpec) -> Result<EstimateResult> {
    let nuis = fit_nuisance_tnd(data, spec)?;
    estimate_tnd_ipw_with(data, &nuis)
}

pub(crate) fn estimate_tnd_ipw_with(data: &TndDataset, nuis: &NuisanceTnd) -> Result<EstimateResult> {
    let mut num = 0.0;
    let mut den = 0.0;
    for r in data.records() {
        if r.y_star {
            if r.v {
                num += 1.0;
            } else {
                let pi = nuis.pi0(&r.x)?;
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
    Ok(EstimateResult::new("tnd-ipw", num / den, data.len())?
        .with_diagnostics(vec![NuisanceDiagnostic::from_glm("propensity-model", &nuis.pi0)]))
}

/// Mean moment residual of the doubly robust log odds-ratio equation at
/// coefficient vector `theta`, with instruments `(1, X)`:
/// `(1/n) Σ (1,X)'(V − π̂*_0) · exp(−φ(X)·V·Y*) · (Y* − μ̂*_0)`,
/// where `φ(X) = (1,X)'θ`.
pub fn dr_moment_residual(
    data: &TndDataset,
    nuis: &NuisanceTnd,
    theta: &DVector<f64>,
) -> Result<DVector<f64>> {
    let cov = nuis.pi_design.covariate_indices();
    let dim = 1 + cov.len();
    if theta.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "theta has {} components, expected {dim}",
            theta.len()
        )));
    }
    let mut resid = DVector::zeros(dim);
    let n = data.len() as f64;
    for r in data.records() {
        let v = f64::from(r.v);
        let y = f64::from(r.y_star);
        let mu0 = nuis.mu0(&r.x)?;
        let pi0 = nuis.pi0(&r.x)?;
        let mut phi = theta[0];
        for (k, &c) in cov.iter().enumerate() {
            phi += theta[k + 1] * r.x[c];
        }
        let weight = (v - pi0) * (-phi * v * y).exp() * (y - mu0) / n;
        resid[0] += weight;
        for (k, &c) in cov.iter().enumerate() {
            resid[k + 1] += weight * r.x[c];
        }
    }
    Ok(resid)
}

/// Residual tolerance for the doubly robust moment solve.
pub const DR_MOMENT_TOL: f64 = 1e-11;

/// Solve the doubly robust moment equation for the coefficients of the log
/// conditional odds-ratio function `φ(X) = (1,X)'θ`.
///
/// Damped Newton with a numeric Jacobian from θ = 0; in the intercept-only
/// case a derivative-free bracketing fallback covers Newton failures.
pub fn solve_dr_or_function(data: &TndDataset, nuis: &NuisanceTnd) -> Result<DVector<f64>> {
    check_nonempty(data)?;
    let dim = 1 + nuis.pi_design.covariate_indices().len();
    let f = |theta: &DVector<f64>| {
        dr_moment_residual(data, nuis, theta).expect("residual dimensions are fixed")
    };
    match newton_solve(&f, DVector::zeros(dim), DR_MOMENT_TOL, 100, "doubly robust moment") {
        Ok(theta) => Ok(theta),
        Err(err) if dim == 1 => {
            let g = |t: f64| f(&DVector::from_vec(vec![t]))[0];
            bisect_scalar(&g, DR_MOMENT_TOL, "doubly robust moment").map_err(|_| err).map(
                |t| DVector::from_vec(vec![t]),
            )
        }
        Err(err) => Err(err),
    }
}

/// Doubly robust estimator: Ψ̂ = Σ V·Y* / Σ V·Y*·exp(−φ̂(X)).
pub fn estimate_tnd_dr(data: &TndDataset, spec: &DesignSpec) -> Result<EstimateResult> {
    let nuis = fit_nuisance_tnd(data, spec)?;
    let theta = solve_dr_or_function(data, &nuis)?;
    estimate_tnd_dr_with(data, &nuis, &theta)
}

pub(crate) fn estimate_tnd_dr_with(
    data: &TndDataset,
    nuis: &NuisanceTnd,
    theta: &DVector<f64>,
) -> Result<EstimateResult> {
    let cov = nuis.pi_design.covariate_indices();
    let mut num = 0.0;
    let mut den = 0.0;
    for r in data.records() {
        if r.v && r.y_star {
            num += 1.0;
            let mut phi = theta[0];
            for (k, &c) in cov.iter().enumerate() {
                phi += theta[k + 1] * r.x[c];
            }
            den += (-phi).exp();
        }
    }
    if num == 0.0 {
        return Err(Error::DegenerateEstimand("no vaccinated test-positives".into()));
    }
    let mut result = EstimateResult::new("tnd-dr", num / den, data.len())?;
    result.diagnostics = vec![
        NuisanceDiagnostic::from_glm("outcome-model", &nuis.mu),
        NuisanceDiagnostic::from_glm("propensity-model", &nuis.pi0),
    ];
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{TndDataset, TndRecord};
    use crate::rng::KeyedRng;
    use crate::toy::toy_tnd;
    use approx::assert_relative_eq;

    fn spec0() -> DesignSpec {
        DesignSpec::main_effects(0)
    }

    #[test]
    fn toy_oracle_all_four_equal_three() {
        let data = toy_tnd();
        let spec = spec0();
        for (psi, label) in [
            (estimate_tnd_logit(&data, &spec).unwrap().psi_hat, "logit"),
            (estimate_tnd_om(&data, &spec).unwrap().psi_hat, "om"),
            (estimate_tnd_ipw(&data, &spec).unwrap().psi_hat, "ipw"),
            (estimate_tnd_dr(&data, &spec).unwrap().psi_hat, "dr"),
        ] {
            assert_relative_eq!(psi, 3.0, epsilon = 1e-10);
            let _ = label;
        }
    }

    #[test]
    fn null_association_gives_one() {
        let mut records = Vec::new();
        for &v in &[true, false] {
            for &y in &[true, false] {
                for _ in 0..3 {
                    records.push(TndRecord { x: vec![], v, y_star: y });
                }
            }
        }
        let data = TndDataset::new(records, 0).unwrap();
        let spec = spec0();
        assert_relative_eq!(estimate_tnd_logit(&data, &spec).unwrap().psi_hat, 1.0, epsilon = 1e-9);
        assert_relative_eq!(estimate_tnd_om(&data, &spec).unwrap().psi_hat, 1.0, epsilon = 1e-9);
        assert_relative_eq!(estimate_tnd_ipw(&data, &spec).unwrap().psi_hat, 1.0, epsilon = 1e-9);
        assert_relative_eq!(estimate_tnd_dr(&data, &spec).unwrap().psi_hat, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn dr_moment_solves_toy_to_log_three() {
        let data = toy_tnd();
        let nuis = fit_nuisance_tnd(&data, &spec0()).unwrap();
        assert_relative_eq!(nuis.mu0(&[]).unwrap(), 0.25, epsilon = 1e-9);
        assert_relative_eq!(nuis.pi0(&[]).unwrap(), 0.4, epsilon = 1e-9);
        let theta = solve_dr_or_function(&data, &nuis).unwrap();
        assert_relative_eq!(theta[0], 3f64.ln(), epsilon = 1e-9);
        let resid = dr_moment_residual(&data, &nuis, &theta).unwrap();
        assert!(resid.amax() <= 1e-8, "residual {}", resid.amax());
    }

    #[test]
    fn degenerate_cells_are_reported() {
        // no vaccinated test-positives
        let records = vec![
            TndRecord { x: vec![], v: true, y_star: false },
            TndRecord { x: vec![], v: false, y_star: true },
            TndRecord { x: vec![], v: false, y_star: false },
        ];
        let data = TndDataset::new(records, 0).unwrap();
        assert!(matches!(
            estimate_tnd_logit(&data, &spec0()),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            estimate_tnd_om(&data, &spec0()),
            Err(Error::DegenerateEstimand(_)) | Err(Error::Separation)
        ));
    }

    fn random_tnd(seed: u64, n: usize, dim: usize) -> TndDataset {
        // rejection-samples until all four V x Y* cells are nonempty
        let mut rng = KeyedRng::from_parts(&[seed, 0xda7a]);
        loop {
            let mut records = Vec::with_capacity(n);
            for _ in 0..n {
                let x: Vec<f64> = (0..dim).map(|_| rng.uniform()).collect();
                let v = rng.bernoulli(0.5);
                let lin = -0.5 + f64::from(v) * 0.8 + x.iter().sum::<f64>() * 0.4;
                let y_star = rng.bernoulli(crate::stats::expit(lin));
                records.push(TndRecord { x, v, y_star });
            }
            let data = TndDataset::new(records, dim).unwrap();
            if cell_counts(&data).iter().all(|&c| c > 0) {
                return data;
            }
        }
    }

    #[test]
    fn intercept_only_collapse_to_crude_odds_ratio() {
        for seed in 0..20 {
            let data = random_tnd(seed, 40, 0);
            let c = cell_counts(&data);
            let crude = (c[0] as f64 * c[3] as f64) / (c[1] as f64 * c[2] as f64);
            let spec = spec0();
            assert_relative_eq!(estimate_tnd_logit(&data, &spec).unwrap().psi_hat, crude, max_relative = 1e-9);
            assert_relative_eq!(estimate_tnd_om(&data, &spec).unwrap().psi_hat, crude, max_relative = 1e-9);
            assert_relative_eq!(estimate_tnd_ipw(&data, &spec).unwrap().psi_hat, crude, max_relative = 1e-9);
            assert_relative_eq!(estimate_tnd_dr(&data, &spec).unwrap().psi_hat, crude, max_relative = 1e-9);
        }
    }

    #[test]
    fn estimates_are_invariant_to_affine_covariate_maps() {
        let data = random_tnd(11, 300, 2);
        let mapped_records: Vec<TndRecord> = data
            .records()
            .iter()
            .map(|r| TndRecord {
                x: vec![5.0 - 2.0 * r.x[0], 0.5 + 0.25 * r.x[1]],
                v: r.v,
                y_star: r.y_star,
            })
            .collect();
        let mapped = TndDataset::new(mapped_records, 2).unwrap();
        let spec = DesignSpec::main_effects(2);
        for (f, tol) in [
            (estimate_tnd_logit as fn(&TndDataset, &DesignSpec) -> Result<EstimateResult>, 1e-8),
            (estimate_tnd_om, 1e-8),
            (estimate_tnd_ipw, 1e-8),
            (estimate_tnd_dr, 1e-7),
        ] {
            let a = f(&data, &spec).unwrap().psi_hat;
            let b = f(&mapped, &spec).unwrap().psi_hat;
            assert_relative_eq!(a, b, max_relative = tol);
        }
    }

    #[test]
    fn dr_residual_small_on_random_data() {
        for seed in [3u64, 7, 13] {
            let data = random_tnd(seed, 250, 1);
            let nuis = fit_nuisance_tnd(&data, &DesignSpec::main_effects(1)).unwrap();
            let theta = solve_dr_or_function(&data, &nuis).unwrap();
            let resid = dr_moment_residual(&data, &nuis, &theta).unwrap();
            assert!(resid.amax() <= 1e-8, "seed {seed}: residual {}", resid.amax());
        }
    }
}
