//! Linear ZF and MMSE precoders in the `P = W diag(d)` factorization.
//!
//! `W` always has unit-norm columns so that `d_k^2` is exactly the transmit
//! power spent on user `k`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::metrics::CostLedger;

/// Condition number above which the ZF Gram matrix is treated as singular.
pub const ZF_CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PrecoderKind {
    Zf,
    Mmse,
}

/// Normalized weights plus per-user amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub w: CMat,
    pub d: Vec<f64>,
    pub power_budget: f64,
}

impl Precoder {
    pub fn new(w: CMat, d: Vec<f64>, power_budget: f64) -> Result<Self> {
        if w.ncols() != d.len() {
            return Err(Error::Dimension(format!(
                "weight matrix has {} columns but power vector has {} entries",
                w.ncols(),
                d.len()
            )));
        }
        if d.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidParameter("power amplitudes must be >= 0".into()));
        }
        Ok(Self { w, d, power_budget })
    }

    /// Effective precoder `W diag(d)`.
    pub fn matrix(&self) -> CMat {
        apply_powers(&self.w, &self.d)
    }

    /// `||W diag(d)||_F^2`.
    pub fn transmit_power(&self) -> f64 {
        self.matrix().norm_squared()
    }

    pub fn num_users(&self) -> usize {
        self.d.len()
    }
}

/// `W diag(d)`.
pub fn apply_powers(w: &CMat, d: &[f64]) -> CMat {
    let mut p = w.clone();
    for (mut col, &amp) in p.column_iter_mut().zip(d) {
        col.scale_mut(amp);
    }
    p
}

/// `G_hat^T G_hat^*` for a block whose columns are users.
fn user_gram(g_hat: &CMat, ledger: &mut CostLedger) -> CMat {
    let gt = g_hat.transpose();
    linalg::matmul(&gt, &g_hat.conjugate(), ledger)
}

/// Zero-forcing directions `G^* (G^T G^*)^{-1}`, columns normalized.
pub fn zf_weights(g_hat: &CMat, ledger: &mut CostLedger) -> Result<CMat> {
    let n = g_hat.ncols();
    let users = || (0..n).collect::<Vec<_>>();
    if n == 0 || n > g_hat.nrows() {
        return Err(Error::Singular {
            users: users(),
            condition: f64::INFINITY,
        });
    }
    let gram = user_gram(g_hat, ledger);
    let condition = linalg::hermitian_condition(&gram, ledger);
    if !(condition <= ZF_CONDITION_LIMIT) {
        return Err(Error::Singular {
            users: users(),
            condition,
        });
    }
    let inv = linalg::hpd_inverse(&gram, ledger).ok_or(Error::Singular {
        users: users(),
        condition,
    })?;
    let raw = linalg::matmul(&g_hat.conjugate(), &inv, ledger);
    Ok(linalg::normalize_columns(&raw, ledger))
}

/// MMSE-regularized directions `G^* (G^T G^* + alpha I)^{-1}` with
/// `alpha = n sigma_w^2 / P`, columns normalized.
pub fn mmse_weights(
    g_hat: &CMat,
    noise_var: f64,
    power_budget: f64,
    ledger: &mut CostLedger,
) -> Result<CMat> {
    let n = g_hat.ncols();
    if n == 0 {
        return Err(Error::InvalidParameter("MMSE precoder needs at least one user".into()));
    }
    if !(power_budget > 0.0) || !(noise_var >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "MMSE precoder needs P > 0 and noise >= 0 (P={power_budget}, noise={noise_var})"
        )));
    }
    let alpha = n as f64 * noise_var / power_budget;
    mmse_weights_with_alpha(g_hat, alpha, ledger)
}

/// As [`mmse_weights`] with an explicit regularization constant.
pub fn mmse_weights_with_alpha(g_hat: &CMat, alpha: f64, ledger: &mut CostLedger) -> Result<CMat> {
    let n = g_hat.ncols();
    let mut gram = user_gram(g_hat, ledger);
    for i in 0..n {
        gram[(i, i)] += Complex64::from(alpha);
    }
    let inv = linalg::hpd_inverse(&gram, ledger).ok_or_else(|| Error::Singular {
        users: (0..n).collect(),
        condition: f64::INFINITY,
    })?;
    let raw = linalg::matmul(&g_hat.conjugate(), &inv, ledger);
    let w = linalg::normalize_columns(&raw, ledger);
    if !linalg::is_finite(&w) {
        return Err(Error::NonFinite("MMSE weights".into()));
    }
    Ok(w)
}

pub fn weights(
    kind: PrecoderKind,
    g_hat: &CMat,
    noise_var: f64,
    power_budget: f64,
    ledger: &mut CostLedger,
) -> Result<CMat> {
    match kind {
        PrecoderKind::Zf => zf_weights(g_hat, ledger),
        PrecoderKind::Mmse => mmse_weights(g_hat, noise_var, power_budget, ledger),
    }
}

/// Equal power loading: every amplitude is `sqrt(P / n)`.
pub fn equal_power_load(n: usize, power_budget: f64) -> Vec<f64> {
    vec![(power_budget / n as f64).sqrt(); n]
}

/// Column norms of `W`, useful for checking the unit-norm invariant.
pub fn column_norms(w: &CMat) -> DVector<f64> {
    DVector::from_iterator(w.ncols(), w.column_iter().map(|c| c.norm()))
}
