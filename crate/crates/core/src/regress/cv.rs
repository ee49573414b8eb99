use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ols_fit, pls_fit, Design, Predictor, RegressError};
use crate::math;

/// Model refit inside each training split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvMethod {
    /// Ordinary least squares.
    Ols,
    /// PLS with a fixed factor count.
    Pls(usize),
}

impl fmt::Display for CvMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ols => f.write_str("ols"),
            Self::Pls(m) => write!(f, "pls({m})"),
        }
    }
}

/// Fold assignment for every repeat, drawn up front from one seeded stream
/// so the repeats can be evaluated in any order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CvPlan {
    /// Folds per repeat.
    pub folds: usize,
    /// Seed of the shuffle stream.
    pub seed: u64,
    /// `assignments[r][i]` is the fold of row `i` in repeat `r`.
    pub assignments: Vec<Vec<usize>>,
}

impl CvPlan {
    /// Shuffles `0..n` once per repeat and cuts the permutation into
    /// contiguous folds whose sizes differ by at most one.
    pub fn new(n: usize, folds: usize, repeats: usize, seed: u64) -> Result<Self, RegressError> {
        if folds < 2 {
            return Err(RegressError::InvalidCv("need at least 2 folds"));
        }
        if repeats == 0 {
            return Err(RegressError::InvalidCv("need at least 1 repeat"));
        }
        if n < 2 * folds {
            return Err(RegressError::TooFewRows { rows: n, needed: 2 * folds });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (base, extra) = (n / folds, n % folds);
        let assignments = (0..repeats)
            .map(|_| {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let mut fold_of = vec![0; n];
                let mut pos = 0;
                for f in 0..folds {
                    let size = base + usize::from(f < extra);
                    for &row in &perm[pos..pos + size] {
                        fold_of[row] = f;
                    }
                    pos += size;
                }
                fold_of
            })
            .collect();
        Ok(Self {
            folds,
            seed,
            assignments,
        })
    }

    /// Repeats in the plan.
    pub fn repeats(&self) -> usize {
        self.assignments.len()
    }

    /// Rows per fold in one repeat.
    pub fn fold_sizes(&self, repeat: usize) -> Vec<usize> {
        let mut sizes = vec![0; self.folds];
        for &f in &self.assignments[repeat] {
            sizes[f] += 1;
        }
        sizes
    }
}

fn fit_and_predict(train: &Design, test: &[&[f64]], method: CvMethod) -> Result<Vec<f64>, RegressError> {
    Ok(match method {
        CvMethod::Ols => {
            let fit = ols_fit(train)?;
            test.iter().map(|r| fit.predict_row(r)).collect()
        }
        CvMethod::Pls(m) => {
            let fit = pls_fit(train, m)?;
            test.iter().map(|r| fit.predict_row(r)).collect()
        }
    })
}

/// Pooled held-out MSE for one fold assignment.
pub fn evaluate_fold_assignment(
    design: &Design,
    method: CvMethod,
    fold_of: &[usize],
    folds: usize,
) -> Result<f64, RegressError> {
    let n = design.n();
    let y = design.y();
    let mut sse = 0.0;
    for f in 0..folds {
        let (test_idx, train_idx): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| fold_of[i] == f);
        let train_rows: Vec<Vec<f64>> = train_idx.iter().map(|&i| design.x().row(i).to_vec()).collect();
        let train_y: Vec<f64> = train_idx.iter().map(|&i| y[i]).collect();
        let train = Design::from_complete(design.names().to_vec(), &train_rows, train_y)?;
        let test_rows: Vec<&[f64]> = test_idx.iter().map(|&i| design.x().row(i)).collect();
        let preds = fit_and_predict(&train, &test_rows, method)?;
        for (&i, p) in test_idx.iter().zip(preds) {
            sse += (y[i] - p) * (y[i] - p);
        }
    }
    Ok(sse / n as f64)
}

/// Repeated k-fold cross-validation summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Folds per repeat.
    pub folds: usize,
    /// Repeats.
    pub repeats: usize,
    /// Shuffle seed.
    pub seed: u64,
    /// Refit model.
    pub method: CvMethod,
    /// Pooled held-out MSE of each repeat.
    pub pooled_mse: Vec<f64>,
    /// Mean over repeats of `1 - MSE / var(y)`, population variance.
    pub r2_cv: f64,
}

impl CvReport {
    /// Combines per-repeat MSEs, in repeat order.
    pub fn from_mse(plan: &CvPlan, method: CvMethod, design: &Design, pooled_mse: Vec<f64>) -> Self {
        let y = design.y();
        let m = math::mean(y);
        let var = y.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / y.len() as f64;
        let r2: Vec<f64> = pooled_mse.iter().map(|mse| 1.0 - mse / var).collect();
        Self {
            folds: plan.folds,
            repeats: plan.repeats(),
            seed: plan.seed,
            method,
            r2_cv: math::mean(&r2),
            pooled_mse,
        }
    }
}

/// Repeated k-fold CV evaluated sequentially.
pub fn repeated_kfold_cv(
    design: &Design,
    method: CvMethod,
    folds: usize,
    repeats: usize,
    seed: u64,
) -> Result<CvReport, RegressError> {
    let plan = CvPlan::new(design.n(), folds, repeats, seed)?;
    let mse = plan
        .assignments
        .iter()
        .map(|a| evaluate_fold_assignment(design, method, a, folds))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(CvReport::from_mse(&plan, method, design, mse))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn random_design(n: usize, k: usize, seed: u64, signal: &[f64]) -> Design {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.gen::<f64>()).collect()).collect();
        let y = rows
            .iter()
            .map(|r| {
                let lin: f64 = r.iter().zip(signal).map(|(x, b)| x * b).sum();
                lin + if signal.is_empty() { rng.gen::<f64>() } else { 0.0 }
            })
            .collect();
        let names: Vec<String> = (0..k).map(|i| alloc::format!("x{i}")).collect();
        Design::from_complete(names, &rows, y).unwrap()
    }

    #[test]
    fn folds_are_equal_when_divisible() {
        let plan = CvPlan::new(100, 10, 3, 7).unwrap();
        for r in 0..3 {
            assert_eq!(plan.fold_sizes(r), vec![10; 10]);
        }
        let uneven = CvPlan::new(23, 10, 1, 7).unwrap();
        let sizes = uneven.fold_sizes(0);
        assert_eq!(sizes.iter().sum::<usize>(), 23);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn plan_rejects_small_samples() {
        assert_eq!(CvPlan::new(19, 10, 1, 0), Err(RegressError::TooFewRows { rows: 19, needed: 20 }));
        assert!(matches!(CvPlan::new(20, 1, 1, 0), Err(RegressError::InvalidCv(_))));
    }

    #[test]
    fn exact_linear_data() {
        let d = random_design(40, 3, 11, &[1.5, -2.0, 0.25]);
        let report = repeated_kfold_cv(&d, CvMethod::Ols, 10, 5, 3).unwrap();
        assert_abs_diff_eq!(report.r2_cv, 1.0, epsilon = 1e-9);
        let pls = repeated_kfold_cv(&d, CvMethod::Pls(3), 10, 5, 3).unwrap();
        assert_abs_diff_eq!(pls.r2_cv, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn same_seed_same_report() {
        let d = random_design(60, 4, 5, &[]);
        let a = repeated_kfold_cv(&d, CvMethod::Ols, 10, 4, 99).unwrap();
        let b = repeated_kfold_cv(&d, CvMethod::Ols, 10, 4, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.r2_cv.to_bits(), b.r2_cv.to_bits());
    }

    #[test]
    fn pure_noise_fixture() {
        let d = random_design(100, 9, 2024, &[]);
        let report = repeated_kfold_cv(&d, CvMethod::Ols, 10, 50, 42).unwrap();
        assert!(report.r2_cv < 0.0);
        assert_abs_diff_eq!(report.r2_cv, NOISE_R2_CV, epsilon = 1e-12);
    }

    const NOISE_R2_CV: f64 = -0.15476039177859435;
}
