use alloc::string::String;
use alloc::vec::Vec;

use super::special::student_t_two_tailed;
use super::StatsError;
use crate::math;

/// Significance marker: `***` p < 0.001, `**` p < 0.01, `*` p < 0.05.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

fn pearson_complete(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() < 3 {
        return Err(StatsError::TooFewPairs(x.len()));
    }
    if x.iter().all(|&v| v == x[0]) || y.iter().all(|&v| v == y[0]) {
        return Err(StatsError::ConstantInput);
    }
    let mx = math::mean(x);
    let my = math::mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok((sxy / math::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Sample Pearson correlation of two complete sequences.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    pearson_complete(x, y)
}

/// Pearson correlation over pairwise-complete entries; returns `(r, n)`.
pub fn pearson_pairwise(x: &[Option<f64>], y: &[Option<f64>]) -> Result<(f64, usize), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip();
    let n = xs.len();
    pearson_complete(&xs, &ys).map(|r| (r, n))
}

/// Two-tailed p-value of a correlation through Student's t with `n - 2`
/// degrees of freedom. `|r| = 1` gives 0.
pub fn correlation_p_value(r: f64, n: usize) -> Result<f64, StatsError> {
    if n < 3 {
        return Err(StatsError::TooFewPairs(n));
    }
    if math::abs(r) >= 1.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    let t = r * math::sqrt(df / (1.0 - r * r));
    Ok(student_t_two_tailed(t, df))
}

/// One cell of a correlation table.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCell {
    /// Pearson r.
    pub r: f64,
    /// Pairwise-complete count.
    pub n: usize,
    /// Two-tailed p.
    pub p: f64,
    /// Significance marker for `p`.
    pub stars: &'static str,
}

impl CorrelationCell {
    /// Correlates two columns with pairwise deletion.
    pub fn compute(x: &[Option<f64>], y: &[Option<f64>]) -> Result<Self, StatsError> {
        let (r, n) = pearson_pairwise(x, y)?;
        let p = correlation_p_value(r, n)?;
        Ok(Self { r, n, p, stars: stars(p) })
    }
}

/// Full symmetric correlation grid between named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    /// Column names.
    pub names: Vec<String>,
    /// Row-major `names.len()^2` cells; failures mark unavailable cells.
    pub cells: Vec<Result<CorrelationCell, StatsError>>,
}

impl CorrelationMatrix {
    /// Cell at `(i, j)`.
    pub fn cell(&self, i: usize, j: usize) -> &Result<CorrelationCell, StatsError> {
        &self.cells[i * self.names.len() + j]
    }
}

/// Correlates every pair of columns. The diagonal is r = 1 whenever the
/// column has at least three present, non-constant values.
pub fn cross_correlation_matrix(columns: &[(String, Vec<Option<f64>>)]) -> CorrelationMatrix {
    let k = columns.len();
    let mut cells: Vec<Result<CorrelationCell, StatsError>> = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let cell = if j < i {
                cells[j * k + i].clone()
            } else {
                CorrelationCell::compute(&columns[i].1, &columns[j].1)
            };
            cells.push(cell);
        }
    }
    CorrelationMatrix {
        names: columns.iter().map(|c| c.0.clone()).collect(),
        cells,
    }
}
