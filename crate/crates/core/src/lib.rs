//! Vaccine effectiveness estimation from test-negative design (TND) and
//! cohort data under odds-ratio equi-confounding.
//!
//! The crate estimates the causal risk ratio among the vaccinated, Ψ (and
//! VE = 1 − Ψ), using outcome-modeling, inverse-probability-weighting and
//! doubly robust estimators on TND samples, their cohort difference-in-
//! differences counterparts, standardization comparators, sandwich/bootstrap
//! inference, an exponential-tilt sensitivity analysis, and a Monte Carlo
//! engine for simulation studies.

pub mod data;
pub mod design;
pub mod error;
pub mod estimators;
pub mod glm;
pub mod inference;
pub(crate) mod numerics;


pub mod rng;


pub mod stats;
pub mod toy;

pub use data::{restrict_to_tested, CohortDataset, CohortRecord, TndDataset, TndRecord, TriOutcome};
pub use design::{DesignSpec, Term};
pub use error::{Error, Result};
pub use estimators::EstimateResult;
