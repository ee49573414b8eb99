//! Dense row-major matrix and Householder least squares.

use alloc::vec;
use alloc::vec::Vec;

use super::RegressError;
use crate::math;

/// Relative pivot size below which a column counts as dependent.
pub(crate) const RANK_TOL: f64 = 1e-10;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Row count.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Element.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub(crate) fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    /// Row slice.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Copy of one column.
    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Sub-matrix of selected rows.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// `[1 | self]` without column `skip`, if given.
    pub(crate) fn with_intercept(&self, skip: Option<usize>) -> Self {
        let keep: Vec<usize> = (0..self.cols).filter(|&c| Some(c) != skip).collect();
        let mut out = Self::zeros(self.rows, keep.len() + 1);
        for r in 0..self.rows {
            out.set(r, 0, 1.0);
            for (j, &c) in keep.iter().enumerate() {
                out.set(r, j + 1, self.get(r, c));
            }
        }
        out
    }

    fn frobenius(&self) -> f64 {
        math::sqrt(self.data.iter().map(|v| v * v).sum())
    }
}

/// Least-squares solution of `A b = y`.
#[derive(Debug, Clone)]
pub(crate) struct LeastSquares {
    pub coef: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Diagonal of `(A^T A)^{-1}`.
    pub inv_gram_diag: Vec<f64>,
}

impl LeastSquares {
    pub fn rss(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }
}

/// Householder QR in place. On return the strict upper triangle of `a`
/// holds R, the returned vector holds R's diagonal, and `rhs` holds `Q^T rhs`.
fn householder_qr(a: &mut Matrix, rhs: &mut [f64]) -> Vec<f64> {
    let (n, p) = (a.rows, a.cols);
    let mut diag = vec![0.0; p];
    for j in 0..p.min(n) {
        let norm = math::sqrt((j..n).map(|i| a.get(i, j) * a.get(i, j)).sum());
        if norm == 0.0 {
            diag[j] = 0.0;
            continue;
        }
        let alpha = if a.get(j, j) > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in column j rows j..n
        let v0 = a.get(j, j) - alpha;
        a.set(j, j, v0);
        let vnorm2: f64 = (j..n).map(|i| a.get(i, j) * a.get(i, j)).sum();
        if vnorm2 > 0.0 {
            for c in j + 1..p {
                let dot: f64 = (j..n).map(|i| a.get(i, j) * a.get(i, c)).sum();
                let f = 2.0 * dot / vnorm2;
                for i in j..n {
                    let v = a.get(i, c) - f * a.get(i, j);
                    a.set(i, c, v);
                }
            }
            let dot: f64 = (j..n).map(|i| a.get(i, j) * rhs[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..n {
                rhs[i] -= f * a.get(i, j);
            }
        }
        diag[j] = alpha;
    }
    diag
}

/// Solves the least-squares problem by Householder QR.
///
/// Fails with [`RegressError::RankDeficient`] when a pivot of R is tiny
/// relative to its column norm.
pub(crate) fn least_squares(a: &Matrix, y: &[f64]) -> Result<LeastSquares, RegressError> {
    let (n, p) = (a.rows, a.cols);
    if n < p {
        return Err(RegressError::TooFewRows { rows: n, needed: p });
    }
    let col_norms: Vec<f64> = (0..p)
        .map(|c| math::sqrt((0..n).map(|r| a.get(r, c) * a.get(r, c)).sum()))
        .collect();
    let mut qr = a.clone();
    let mut qty = y.to_vec();
    let diag = householder_qr(&mut qr, &mut qty);
    for j in 0..p {
        if !(math::abs(diag[j]) > RANK_TOL * col_norms[j].max(f64::MIN_POSITIVE)) {
            return Err(RegressError::RankDeficient);
        }
    }
    let r = |i: usize, j: usize| if i == j { diag[i] } else { qr.get(i, j) };

    let mut coef = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|j| r(i, j) * coef[j]).sum();
        coef[i] = (qty[i] - s) / r(i, i);
    }

    // R^{-1}, upper triangular, column by column
    let mut rinv = Matrix::zeros(p, p);
    for c in 0..p {
        for i in (0..=c).rev() {
            let e = if i == c { 1.0 } else { 0.0 };
            let s: f64 = (i + 1..=c).map(|j| r(i, j) * rinv.get(j, c)).sum();
            rinv.set(i, c, (e - s) / r(i, i));
        }
    }
    let inv_gram_diag = (0..p).map(|i| (i..p).map(|c| rinv.get(i, c) * rinv.get(i, c)).sum()).collect();

    let residuals = (0..n)
        .map(|i| y[i] - a.row(i).iter().zip(&coef).map(|(x, b)| x * b).sum::<f64>())
        .collect();
    Ok(LeastSquares {
        coef,
        residuals,
        inv_gram_diag,
    })
}

/// Numerical rank: pivoted Gram-Schmidt over the columns, stopping when
/// the largest residual column norm falls below `RANK_TOL` times the
/// Frobenius norm.
pub fn numerical_rank(a: &Matrix) -> usize {
    let scale = a.frobenius();
    if scale == 0.0 {
        return 0;
    }
    let mut cols: Vec<Vec<f64>> = (0..a.cols).map(|c| a.column(c)).collect();
    let mut rank = 0;
    while !cols.is_empty() {
        let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>()).collect();
        let (best, &best_norm) = norms
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        if math::sqrt(best_norm) <= RANK_TOL * scale {
            break;
        }
        let q: Vec<f64> = {
            let pivot = cols.swap_remove(best);
            let norm = math::sqrt(best_norm);
            pivot.into_iter().map(|v| v / norm).collect()
        };
        // two passes keep the residuals orthogonal in floating point
        for _ in 0..2 {
            for c in cols.iter_mut() {
                let dot: f64 = c.iter().zip(&q).map(|(a, b)| a * b).sum();
                for (v, qi) in c.iter_mut().zip(&q) {
                    *v -= dot * qi;
                }
            }
        }
        rank += 1;
    }
    rank
}
