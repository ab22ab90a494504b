//! Regression design specifications.
//!
//! A [`DesignSpec`] is an ordered list of terms over the intercept, the
//! vaccination indicator `V`, covariate components, and `V×X` interactions.
//! Estimators derive their nuisance-model designs (outcome, propensity) from
//! the covariate set declared here.

use crate::error::{Error, Result};

/// One regression term. `X(i)` and `VX(i)` index covariate components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    Intercept,
    V,
    X(usize),
    VX(usize),
}

/// Ordered term list; the intercept always comes first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignSpec {
    terms: Vec<Term>,
}

impl DesignSpec {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        match terms.first() {
            Some(Term::Intercept) => Ok(DesignSpec { terms }),
            _ => Err(Error::Config("design must start with an intercept term".into())),
        }
    }

    /// Main-effects spec over all covariates of a dataset: `(1, V, X)`.
    pub fn main_effects(covariate_dim: usize) -> Self {
        let mut terms = vec![Term::Intercept, Term::V];
        terms.extend((0..covariate_dim).map(Term::X));
        DesignSpec { terms }
    }

    /// Fully interacted spec: `(1, V, X, VX)`.
    pub fn with_interactions(covariate_dim: usize) -> Self {
        Self::interactions_over(&(0..covariate_dim).collect::<Vec<_>>())
    }

    /// Main-effects spec over an explicit covariate index set.
    pub fn main_effects_over(indices: &[usize]) -> Self {
        let mut terms = vec![Term::Intercept, Term::V];
        terms.extend(indices.iter().copied().map(Term::X));
        DesignSpec { terms }
    }

    /// Fully interacted spec over an explicit covariate index set.
    pub fn interactions_over(indices: &[usize]) -> Self {
        let mut terms = vec![Term::Intercept, Term::V];
        terms.extend(indices.iter().copied().map(Term::X));
        terms.extend(indices.iter().copied().map(Term::VX));
        DesignSpec { terms }
    }

    /// Covariates-only spec `(1, X)` over an explicit index set (no `V`).
    pub fn x_only_over(indices: &[usize]) -> Self {
        let mut terms = vec![Term::Intercept];
        terms.extend(indices.iter().copied().map(Term::X));
        DesignSpec { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn width(&self) -> usize {
        self.terms.len()
    }

    /// Covariate indices referenced by any `X`/`VX` term, in first-seen order.
    pub fn covariate_indices(&self) -> Vec<usize> {
        let mut seen = Vec::new();
        for t in &self.terms {
            if let Term::X(i) | Term::VX(i) = t {
                if !seen.contains(i) {
                    seen.push(*i);
                }
            }
        }
        seen
    }

    /// Index of the `V` main-effect column, if present.
    pub fn v_index(&self) -> Option<usize> {
        self.terms.iter().position(|t| matches!(t, Term::V))
    }

    /// Fill one design row for a record.
    pub fn fill_row(&self, x: &[f64], v: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.terms.len());
        for (slot, term) in out.iter_mut().zip(&self.terms) {
            *slot = match *term {
                Term::Intercept => 1.0,
                Term::V => v,
                Term::X(i) => x[i],
                Term::VX(i) => v * x[i],
            };
        }
    }

    pub fn row(&self, x: &[f64], v: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.terms.len()];
        self.fill_row(x, v, &mut out);
        out
    }

    /// Check that every referenced covariate exists in a dataset of the given
    /// dimension.
    pub fn validate(&self, covariate_dim: usize) -> Result<()> {
        for t in &self.terms {
            if let Term::X(i) | Term::VX(i) = t {
                if *i >= covariate_dim {
                    return Err(Error::DimensionMismatch(format!(
                        "design references covariate {i} but the dataset has dimension {covariate_dim}"
                    )));
                }
            }
        }
        Ok(())
    }
}
