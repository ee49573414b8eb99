//! Rayon-backed batch helpers.

use percept_core::regress::{evaluate_fold_assignment, CvPlan};
use percept_core::{CvMethod, CvReport, Design, RegressError};
use rayon::prelude::*;

use crate::error::{PerceptError, Result};

/// Runs `f` on a pool of `threads` workers, or on the global pool when 0.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| PerceptError::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Repeated k-fold CV with repeats spread over the pool. The plan is drawn
/// up front and MSEs are collected in repeat order, so the report is
/// bit-identical to the sequential one.
pub fn parallel_repeated_kfold_cv(
    design: &Design,
    method: CvMethod,
    folds: usize,
    repeats: usize,
    seed: u64,
) -> Result<CvReport, RegressError> {
    let plan = CvPlan::new(design.n(), folds, repeats, seed)?;
    let mse = plan
        .assignments
        .par_iter()
        .map(|a| evaluate_fold_assignment(design, method, a, folds))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(CvReport::from_mse(&plan, method, design, mse))
}

/// Maps every item in parallel and returns the results in input order,
/// failing with the first error in that order.
pub fn ordered_map<T: Sync, U: Send, E: Send>(items: &[T], f: impl Fn(&T) -> Result<U, E> + Sync + Send) -> Result<Vec<U>, E> {
    items.par_iter().map(f).collect::<Vec<_>>().into_iter().collect()
}
