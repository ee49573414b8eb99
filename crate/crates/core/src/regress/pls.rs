use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::linalg::{numerical_rank, Matrix};
use super::{total_sum_of_squares, Design, Predictor, RegressError};
use crate::math;

/// Residual norm, relative to the starting norm, at which deflation stops.
const DEFLATION_TOL: f64 = 1e-12;

/// Single-response PLS model fitted by NIPALS on autoscaled data.
#[derive(Debug, Clone, PartialEq)]
pub struct PlsModel {
    /// Predictor names.
    pub names: Vec<String>,
    /// Factors requested.
    pub requested: usize,
    /// Column means of X.
    pub x_mean: Vec<f64>,
    /// Column sample SDs of X.
    pub x_scale: Vec<f64>,
    /// Mean of y.
    pub y_mean: f64,
    /// Sample SD of y.
    pub y_scale: f64,
    /// Unit weight vector per factor.
    pub weights: Vec<Vec<f64>>,
    /// X loading per factor.
    pub loadings: Vec<Vec<f64>>,
    /// Training score per factor.
    pub scores: Vec<Vec<f64>>,
    /// Inner regression coefficient per factor.
    pub inner: Vec<f64>,
    /// Training R².
    pub r2: f64,
}

impl PlsModel {
    /// Factors actually extracted.
    pub fn m(&self) -> usize {
        self.inner.len()
    }

    /// True when deflation exhausted X or y before `requested` factors.
    pub fn truncated(&self) -> bool {
        self.m() < self.requested
    }

    /// Standardised regression coefficients, one per predictor: the
    /// autoscaled-y response to a one-SD step in that predictor.
    pub fn standardized_coefficients(&self) -> Vec<f64> {
        let k = self.names.len();
        (0..k)
            .map(|j| {
                let mut z = vec![0.0; k];
                z[j] = 1.0;
                self.predict_scaled(z)
            })
            .collect()
    }

    fn predict_scaled(&self, mut z: Vec<f64>) -> f64 {
        let mut yhat = 0.0;
        for ((w, p), q) in self.weights.iter().zip(&self.loadings).zip(&self.inner) {
            let t = dot(&z, w);
            yhat += q * t;
            for (zi, pi) in z.iter_mut().zip(p) {
                *zi -= t * pi;
            }
        }
        yhat
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

/// Fits `m` PLS factors. `m = 0` gives the mean model.
pub fn pls_fit(design: &Design, m: usize) -> Result<PlsModel, RegressError> {
    let (n, k) = (design.n(), design.k());
    let y0 = design.y();
    let x_mean: Vec<f64> = (0..k).map(|c| math::mean(&design.x().column(c))).collect();
    let x_scale: Vec<f64> = (0..k)
        .map(|c| math::sqrt(math::sample_variance(&design.x().column(c))))
        .collect();
    let y_mean = math::mean(y0);
    let y_scale = math::sqrt(math::sample_variance(y0));

    // column-major residual X
    let mut cols: Vec<Vec<f64>> = (0..k)
        .map(|c| (0..n).map(|r| (design.x().get(r, c) - x_mean[c]) / x_scale[c]).collect())
        .collect();
    let mut y: Vec<f64> = y0.iter().map(|v| (v - y_mean) / y_scale).collect();

    if m > 0 {
        let mut scaled = Matrix::zeros(n, k);
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                scaled.set(r, c, *v);
            }
        }
        let rank = numerical_rank(&scaled);
        if m > rank {
            return Err(RegressError::RankExceeded { requested: m, rank });
        }
    }

    let x_norm0 = math::sqrt(cols.iter().map(|c| dot(c, c)).sum());
    let y_norm0 = norm(&y);
    let mut model = PlsModel {
        names: design.names().to_vec(),
        requested: m,
        x_mean,
        x_scale,
        y_mean,
        y_scale,
        weights: Vec::with_capacity(m),
        loadings: Vec::with_capacity(m),
        scores: Vec::with_capacity(m),
        inner: Vec::with_capacity(m),
        r2: 0.0,
    };

    for _ in 0..m {
        let x_norm = math::sqrt(cols.iter().map(|c| dot(c, c)).sum());
        if x_norm < DEFLATION_TOL * x_norm0 || norm(&y) < DEFLATION_TOL * y_norm0 {
            break;
        }
        let mut w: Vec<f64> = cols.iter().map(|c| dot(c, &y)).collect();
        let w_norm = norm(&w);
        if w_norm < DEFLATION_TOL * x_norm0 * y_norm0 {
            break;
        }
        w.iter_mut().for_each(|v| *v /= w_norm);

        let mut t = vec![0.0; n];
        for (c, wc) in cols.iter().zip(&w) {
            for (ti, xi) in t.iter_mut().zip(c) {
                *ti += xi * wc;
            }
        }
        let tt = dot(&t, &t);
        let p: Vec<f64> = cols.iter().map(|c| dot(c, &t) / tt).collect();
        let q = dot(&y, &t) / tt;

        for (c, pc) in cols.iter_mut().zip(&p) {
            for (xi, ti) in c.iter_mut().zip(&t) {
                *xi -= ti * pc;
            }
        }
        for (yi, ti) in y.iter_mut().zip(&t) {
            *yi -= q * ti;
        }

        model.weights.push(w);
        model.loadings.push(p);
        model.scores.push(t);
        model.inner.push(q);
    }

    let rss: f64 = y.iter().map(|v| v * v).sum::<f64>() * y_scale * y_scale;
    model.r2 = 1.0 - rss / total_sum_of_squares(y0);
    Ok(model)
}

impl Predictor for PlsModel {
    fn names(&self) -> &[String] {
        &self.names
    }

    fn predict_row(&self, row: &[f64]) -> f64 {
        let z: Vec<f64> = row
            .iter()
            .zip(self.x_mean.iter().zip(&self.x_scale))
            .map(|(x, (m, s))| (x - m) / s)
            .collect();
        self.y_mean + self.y_scale * self.predict_scaled(z)
    }
}
