//! Small worked datasets with closed-form estimates, used in documentation
//! and throughout the test suites.
//!
//! The 8-record TND sample has crude odds ratio (2·3)/(2·1) = 3; the
//! 20-record cohort restricts to exactly that TND sample.

use crate::data::{CohortDataset, CohortRecord, TndDataset, TndRecord, TriOutcome};

/// 20-record cohort: vaccinated 2/2/6 and unvaccinated 1/3/6 subjects with
/// Y = 2/1/0 respectively. No covariates.
pub fn toy_cohort() -> CohortDataset {
    let mut records = Vec::new();
    let mut push = |v: bool, y: TriOutcome, count: usize| {
        for _ in 0..count {
            records.push(CohortRecord { x: vec![], v, y });
        }
    };
    push(true, TriOutcome::TestPositive, 2);
    push(true, TriOutcome::TestNegative, 2);
    push(true, TriOutcome::NotTested, 6);
    push(false, TriOutcome::TestPositive, 1);
    push(false, TriOutcome::TestNegative, 3);
    push(false, TriOutcome::NotTested, 6);
    CohortDataset::new(records, 0).expect("toy cohort is well formed")
}

/// The toy cohort with one finite-decimal covariate column, for CSV tests.
pub fn toy_cohort_with_x() -> CohortDataset {
    let base = toy_cohort();
    let records = base
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| CohortRecord { x: vec![0.25 * (i % 5) as f64], v: r.v, y: r.y })
        .collect();
    CohortDataset::new(records, 1)
        .and_then(|d| d.with_names(vec!["x0".into()]))
        .expect("toy cohort is well formed")
}

/// 8-record TND sample: vaccinated 2 cases / 2 controls, unvaccinated
/// 1 case / 3 controls. Crude odds ratio 3.
pub fn toy_tnd() -> TndDataset {
    let mut records = Vec::new();
    let mut push = |v: bool, y_star: bool, count: usize| {
        for _ in 0..count {
            records.push(TndRecord { x: vec![], v, y_star });
        }
    };
    push(true, true, 2);
    push(true, false, 2);
    push(false, true, 1);
    push(false, false, 3);
    TndDataset::new(records, 0).expect("toy TND is well formed")
}
