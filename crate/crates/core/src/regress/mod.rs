//! Linear models linking features to ratings: OLS with semipartial
//! correlations, NIPALS PLS1, and repeated k-fold cross-validation.

use alloc::string::String;
use alloc::vec::Vec;

mod cv;
pub mod linalg;
mod ols;
mod pls;

pub use cv::{evaluate_fold_assignment, repeated_kfold_cv, CvMethod, CvPlan, CvReport};
pub use linalg::{numerical_rank, Matrix};
pub use ols::{adjusted_r2, ols_fit, OlsFit};
pub use pls::{pls_fit, PlsModel};

use crate::math;

/// Model fitting errors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegressError {
    /// Not enough complete rows for the model.
    #[error("{rows} complete rows, need at least {needed}")]
    TooFewRows {
        /// Rows available.
        rows: usize,
        /// Rows required.
        needed: usize,
    },
    /// Design without predictors.
    #[error("design has no predictors")]
    NoPredictors,
    /// Predictor names and columns disagree.
    #[error("{names} names for {columns} columns")]
    NameMismatch {
        /// Names given.
        names: usize,
        /// Columns given.
        columns: usize,
    },
    /// A predictor with a single value over the complete rows.
    #[error("predictor `{0}` is constant")]
    ConstantPredictor(String),
    /// The response has zero variance.
    #[error("response is constant")]
    ConstantResponse,
    /// Linearly dependent predictors.
    #[error("design matrix is rank deficient")]
    RankDeficient,
    /// More PLS factors than the rank of the centered predictors.
    #[error("{requested} factors requested but the centered design has rank {rank}")]
    RankExceeded {
        /// Requested factor count.
        requested: usize,
        /// Numerical rank.
        rank: usize,
    },
    /// Prediction input does not match the training columns.
    #[error("prediction columns do not match the training design")]
    SchemaMismatch,
    /// Cross-validation parameters out of range.
    #[error("invalid cross-validation setup: {0}")]
    InvalidCv(&'static str),
}

/// Complete-case predictor table and response.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    names: Vec<String>,
    x: Matrix,
    y: Vec<f64>,
    mask: Vec<bool>,
}

impl Design {
    /// Builds a design from rows that may have missing cells; rows missing
    /// any predictor or the response are dropped.
    pub fn new(names: Vec<String>, rows: &[Vec<Option<f64>>], y: &[Option<f64>]) -> Result<Self, RegressError> {
        if rows.len() != y.len() {
            return Err(RegressError::NameMismatch {
                names: y.len(),
                columns: rows.len(),
            });
        }
        let k = names.len();
        let mut mask = Vec::with_capacity(rows.len());
        let mut kept_rows = Vec::new();
        let mut kept_y = Vec::new();
        for (row, target) in rows.iter().zip(y) {
            if row.len() != k {
                return Err(RegressError::NameMismatch { names: k, columns: row.len() });
            }
            let complete: Option<Vec<f64>> = row.iter().copied().collect();
            match (complete, target) {
                (Some(r), Some(t)) => {
                    kept_rows.push(r);
                    kept_y.push(*t);
                    mask.push(true);
                }
                _ => mask.push(false),
            }
        }
        let mut design = Self::from_complete(names, &kept_rows, kept_y)?;
        design.mask = mask;
        Ok(design)
    }

    /// Builds a design from complete data.
    pub fn from_complete(names: Vec<String>, rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self, RegressError> {
        let k = names.len();
        if k == 0 {
            return Err(RegressError::NoPredictors);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != k) {
            return Err(RegressError::NameMismatch { names: k, columns: bad.len() });
        }
        let n = rows.len();
        if n < k + 2 {
            return Err(RegressError::TooFewRows { rows: n, needed: k + 2 });
        }
        let x = if n == 0 { Matrix::zeros(0, k) } else { Matrix::from_rows(rows) };
        for (c, name) in names.iter().enumerate() {
            let first = x.get(0, c);
            if (1..n).all(|r| x.get(r, c) == first) {
                return Err(RegressError::ConstantPredictor(name.clone()));
            }
        }
        if y.iter().all(|&v| v == y[0]) {
            return Err(RegressError::ConstantResponse);
        }
        Ok(Self {
            names,
            x,
            y,
            mask: alloc::vec![true; n],
        })
    }

    /// Predictor names.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Complete-case predictors.
    pub fn x(&self) -> &Matrix {
        &self.x
    }

    /// Complete-case response.
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Which input rows were kept.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Complete rows.
    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Predictors.
    pub fn k(&self) -> usize {
        self.names.len()
    }

    /// Rows as owned vectors.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|r| self.x.row(r).to_vec()).collect()
    }
}

/// Sum of squares about the mean.
pub(crate) fn total_sum_of_squares(y: &[f64]) -> f64 {
    let m = math::mean(y);
    y.iter().map(|v| (v - m) * (v - m)).sum()
}

/// A fitted model that maps one predictor row to a response.
pub trait Predictor {
    /// Training predictor names in order.
    fn names(&self) -> &[String];

    /// Prediction for one complete row in training column order.
    fn predict_row(&self, row: &[f64]) -> f64;

    /// Predicts every row; rows with a missing cell give `None`.
    fn predict(&self, names: &[String], rows: &[Vec<Option<f64>>]) -> Result<Vec<Option<f64>>, RegressError> {
        if names != self.names() {
            return Err(RegressError::SchemaMismatch);
        }
        rows.iter()
            .map(|row| {
                if row.len() != names.len() {
                    return Err(RegressError::SchemaMismatch);
                }
                let complete: Option<Vec<f64>> = row.iter().copied().collect();
                Ok(complete.map(|r| self.predict_row(&r)))
            })
            .collect()
    }

    /// Predictions for a design's complete rows.
    fn fitted(&self, design: &Design) -> Vec<f64> {
        (0..design.n()).map(|r| self.predict_row(design.x().row(r))).collect()
    }
}

/// Predicts with any fitted model.
pub fn predict(model: &impl Predictor, names: &[String], rows: &[Vec<Option<f64>>]) -> Result<Vec<Option<f64>>, RegressError> {
    model.predict(names, rows)
}
