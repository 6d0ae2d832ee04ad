//! Dense complex linear algebra with FLOP charging.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::metrics::CostLedger;

pub type CMat = DMatrix<Complex64>;

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn matmul(a: &CMat, b: &CMat, ledger: &mut CostLedger) -> CMat {
    ledger.charge_matmul(a.nrows(), a.ncols(), b.ncols());
    a * b
}

/// Copy of the selected columns, in the given order.
pub fn select_columns(m: &CMat, cols: &[usize]) -> CMat {
    CMat::from_fn(m.nrows(), cols.len(), |r, j| m[(r, cols[j])])
}

/// Copy of the selected rows, in the given order.
pub fn select_rows(m: &CMat, rows: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), m.ncols(), |i, c| m[(rows[i], c)])
}

pub fn hermitize(m: &mut CMat) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Inverse of a Hermitian positive-definite matrix. The input is
/// symmetrized first; returns `None` when the Cholesky factorization fails.
pub fn hpd_inverse(m: &CMat, ledger: &mut CostLedger) -> Option<CMat> {
    ledger.charge_inverse(m.nrows());
    let mut h = m.clone();
    hermitize(&mut h);
    let chol = h.cholesky()?;
    Some(chol.inverse())
}

/// Eigenvalue-based condition number of a Hermitian matrix.
pub fn hermitian_condition(m: &CMat, ledger: &mut CostLedger) -> f64 {
    ledger.charge_inverse(m.nrows());
    let mut h = m.clone();
    hermitize(&mut h);
    let eig = h.symmetric_eigenvalues();
    let max = eig.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let min = eig.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `log2 |det(m)|` from the diagonal of an LU factorization, so large
/// determinants do not overflow.
pub fn log2_abs_det(m: &CMat, ledger: &mut CostLedger) -> f64 {
    ledger.charge_determinant(m.nrows());
    let lu = m.clone().lu();
    let u = lu.u();
    u.diagonal().iter().map(|z| z.norm().log2()).sum()
}

/// Rescales every column to unit Euclidean norm. Zero columns stay zero.
pub fn normalize_columns(m: &CMat, ledger: &mut CostLedger) -> CMat {
    ledger.charge_real((4 * m.nrows() * m.ncols()) as u64);
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col.unscale_mut(norm);
        }
    }
    out
}

/// Squared Euclidean norm of every column.
pub fn column_powers(m: &CMat) -> Vec<f64> {
    m.column_iter().map(|c| c.norm_squared()).collect()
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}
