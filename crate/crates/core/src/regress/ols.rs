use alloc::string::String;
use alloc::vec::Vec;

use super::linalg::least_squares;
use super::{total_sum_of_squares, Design, Predictor, RegressError};
use crate::math;
use crate::stats::special::student_t_two_tailed;

/// Ordinary least-squares fit with an intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// Predictor names.
    pub names: Vec<String>,
    /// Standardized coefficients `b_i * sd(x_i) / sd(y)`.
    pub beta_std: Vec<f64>,
    /// Raw slopes.
    pub b_raw: Vec<f64>,
    /// Raw intercept.
    pub intercept: f64,
    /// Standard errors of the slopes.
    pub se: Vec<f64>,
    /// `b_i / se_i`.
    pub t: Vec<f64>,
    /// Two-tailed p of each slope.
    pub p: Vec<f64>,
    /// Signed semipartial correlations from drop-one refits.
    pub sr: Vec<f64>,
    /// Coefficient of determination.
    pub r2: f64,
    /// Adjusted R².
    pub adj_r2: f64,
    /// `n - k - 1`.
    pub df_residual: usize,
    /// Complete rows used.
    pub n: usize,
    /// Training residuals.
    pub residuals: Vec<f64>,
}

/// `1 - (1 - R²)(n - 1)/(n - k - 1)`.
pub fn adjusted_r2(r2: f64, n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    1.0 - (1.0 - r2) * (n - 1.0) / (n - k - 1.0)
}

fn r_squared(rss: f64, tss: f64) -> f64 {
    (1.0 - rss / tss).max(0.0)
}

/// Fits `y = b0 + X b` by Householder QR.
pub fn ols_fit(design: &Design) -> Result<OlsFit, RegressError> {
    let (n, k) = (design.n(), design.k());
    if n < k + 2 {
        return Err(RegressError::TooFewRows { rows: n, needed: k + 2 });
    }
    let y = design.y();
    let tss = total_sum_of_squares(y);
    let full = least_squares(&design.x().with_intercept(None), y)?;
    let rss = full.rss();
    let r2 = r_squared(rss, tss);
    let df = n - k - 1;
    let sigma2 = rss / df as f64;

    let sd_y = math::sqrt(math::sample_variance(y));
    let mut beta_std = Vec::with_capacity(k);
    let mut se = Vec::with_capacity(k);
    let mut t = Vec::with_capacity(k);
    let mut p = Vec::with_capacity(k);
    let mut sr = Vec::with_capacity(k);
    for i in 0..k {
        let b = full.coef[i + 1];
        let sd_x = math::sqrt(math::sample_variance(&design.x().column(i)));
        beta_std.push(b * sd_x / sd_y);

        let s = math::sqrt(sigma2 * full.inv_gram_diag[i + 1]);
        let ti = if s > 0.0 {
            b / s
        } else if b == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(b)
        };
        se.push(s);
        t.push(ti);
        p.push(student_t_two_tailed(ti, df as f64));

        let reduced = least_squares(&design.x().with_intercept(Some(i)), y)?;
        let drop = (r2 - r_squared(reduced.rss(), tss)).max(0.0);
        sr.push(math::sqrt(drop).copysign(b));
    }

    Ok(OlsFit {
        names: design.names().to_vec(),
        beta_std,
        b_raw: full.coef[1..].to_vec(),
        intercept: full.coef[0],
        se,
        t,
        p,
        sr,
        r2,
        adj_r2: adjusted_r2(r2, n, k),
        df_residual: df,
        n,
        residuals: full.residuals,
    })
}

impl OlsFit {
    /// Semipartials through `|t_i| sqrt((1 - R²)/df)`; agrees with the
    /// drop-one values in [`OlsFit::sr`].
    pub fn sr_from_t(&self) -> Vec<f64> {
        let f = math::sqrt((1.0 - self.r2) / self.df_residual as f64);
        self.t
            .iter()
            .zip(&self.b_raw)
            .map(|(t, b)| (math::abs(*t) * f).copysign(*b))
            .collect()
    }
}

impl Predictor for OlsFit {
    fn names(&self) -> &[String] {
        &self.names
    }

    fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept + row.iter().zip(&self.b_raw).map(|(x, b)| x * b).sum::<f64>()
    }
}
