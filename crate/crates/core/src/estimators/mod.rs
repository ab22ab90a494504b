//! Point estimators of Ψ, the causal risk ratio among the vaccinated.
//!
//! TND estimators operate on test-negative samples; cohort estimators use the
//! full tri-level outcome. All estimators are pure functions of immutable
//! datasets and may run concurrently.

pub mod cohort;
pub mod tnd;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::FittedGlm;

/// Convergence bookkeeping for one nuisance model or moment solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NuisanceDiagnostic {
    pub name: String,
    pub converged: bool,
    pub iterations: usize,
}

impl NuisanceDiagnostic {
    pub(crate) fn from_glm(name: &str, fit: &FittedGlm) -> Self {
        NuisanceDiagnostic {
            name: name.to_string(),
            converged: fit.converged(),
            iterations: fit.iterations(),
        }
    }
}

/// Point estimate of Ψ with optional inference attached.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateResult {
    /// Estimate of the causal risk ratio among the vaccinated.
    pub psi_hat: f64,
    /// Vaccine effectiveness, `1 - psi_hat`.
    pub ve_hat: f64,
    /// Standard error of `psi_hat`, when inference was requested.
    pub se: Option<f64>,
    /// Confidence interval for Ψ; on the natural scale the lower bound may
    /// be negative even though Ψ > 0.
    pub ci: Option<(f64, f64)>,
    /// Estimator label.
    pub method: String,
    /// Number of records used.
    pub n: usize,
    /// Convergence flags of nuisance fits and moment solves.
    pub diagnostics: Vec<NuisanceDiagnostic>,
}

impl EstimateResult {
    pub(crate) fn new(method: &str, psi_hat: f64, n: usize) -> Result<Self> {
        if !(psi_hat.is_finite() && psi_hat > 0.0) {
            return Err(Error::DegenerateEstimand(format!(
                "{method} produced psi = {psi_hat}"
            )));
        }
        Ok(EstimateResult {
            psi_hat,
            ve_hat: 1.0 - psi_hat,
            se: None,
            ci: None,
            method: method.to_string(),
            n,
            diagnostics: Vec::new(),
        })
    }

    pub(crate) fn with_diagnostics(mut self, diagnostics: Vec<NuisanceDiagnostic>) -> Self {
        self.diagnostics = diagnostics;
        self
    }
}

/// TND estimator choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TndEstimator {
    /// Conventional logistic regression of `Y*` on `(1, V, X)`; Ψ̂ = exp(γ̂_V).
    Logit,
    /// Outcome-modeling plug-in.
    Om,
    /// Inverse-probability-weighting plug-in.
    Ipw,
    /// Doubly robust estimator via the log odds-ratio moment equation.
    Dr,
}

/// Cohort estimator choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CohortEstimator {
    /// Multiplicative difference-in-differences, outcome-modeling form.
    DidOm,
    /// Multiplicative difference-in-differences, IPW form.
    DidIpw,
    /// Naive standardization of Pr[Y=2 | V=v, X] over the full sample.
    Standardized,
    /// Universal difference-in-differences doubly robust estimator.
    UdidDr,
}
