//! Closed-form downlink sum-rates for CF and clustered CF networks.
//!
//! For cluster `c` with scheduled users, effective precoder `P_c`, estimate
//! `G_hat` and error `G_err`, the sum-rate is
//!
//! ```text
//! SR_c = log2 det( rho G_hat_cc^T P_c P_c^H G_hat_cc^* R_c^{-1} + I )
//! R_c  = rho G_err_cc^T P_c P_c^H G_err_cc^*
//!      + sum_{i != c} rho (G_hat_ic^T P_i P_i^H G_hat_ic^* + G_err_ic^T P_i P_i^H G_err_ic^*)
//!      + sigma_w^2 I
//! ```
//!
//! With a single cluster the interference sum is empty and this is the CF
//! sum-rate. Interfering precoders `P_i` are `M_i x n_i`: cluster `i` serves
//! its own users through them.

use num_complex::Complex64;

use crate::channel::ChannelBlock;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::metrics::CostLedger;

/// Another cluster's transmission as seen by the users of the cluster under
/// evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferer {
    /// `M_i x n_c` channels from the interfering APs to the victim users.
    pub block: ChannelBlock,
    /// `M_i x n_i` effective precoder of the interfering cluster.
    pub precoder: CMat,
}

/// Everything needed to evaluate every cluster's sum-rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RateContext {
    pub rho: f64,
    pub noise_var: f64,
    /// `blocks[i][c]`: APs of cluster `i` towards scheduled users of cluster `c`.
    pub blocks: Vec<Vec<ChannelBlock>>,
    /// `precoders[i]`: effective `M_i x n_i` precoder of cluster `i`.
    pub precoders: Vec<CMat>,
}

impl RateContext {
    pub fn num_clusters(&self) -> usize {
        self.precoders.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_var > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be positive, got {}",
                self.noise_var
            )));
        }
        let c_count = self.precoders.len();
        if self.blocks.len() != c_count || self.blocks.iter().any(|row| row.len() != c_count) {
            return Err(Error::Dimension(format!(
                "expected {c_count}x{c_count} channel blocks"
            )));
        }
        for i in 0..c_count {
            let m_i = self.precoders[i].nrows();
            for c in 0..c_count {
                let blk = &self.blocks[i][c];
                let n_c = self.precoders[c].ncols();
                if blk.hat.shape() != (m_i, n_c) || blk.err.shape() != (m_i, n_c) {
                    return Err(Error::Dimension(format!(
                        "block ({i},{c}) is {:?}, expected ({m_i}, {n_c})",
                        blk.hat.shape()
                    )));
                }
            }
        }
        Ok(())
    }

    fn interferers(&self, c: usize) -> Vec<Interferer> {
        (0..self.num_clusters())
            .filter(|&i| i != c)
            .map(|i| Interferer {
                block: self.blocks[i][c].clone(),
                precoder: self.precoders[i].clone(),
            })
            .collect()
    }
}

/// `rho (A^T P)(A^T P)^H` accumulated into `acc`.
fn add_gram(acc: &mut CMat, a: &CMat, p: &CMat, rho: f64, ledger: &mut CostLedger) {
    let x = linalg::matmul(&a.transpose(), p, ledger);
    let g = linalg::matmul(&x, &x.adjoint(), ledger);
    ledger.charge_cadd((g.nrows() * g.ncols()) as u64);
    *acc += g * Complex64::from(rho);
}

/// Interference-plus-noise covariance `R_c`.
pub fn interference_covariance(
    own: &ChannelBlock,
    own_precoder: &CMat,
    interferers: &[Interferer],
    rho: f64,
    noise_var: f64,
    ledger: &mut CostLedger,
) -> CMat {
    let n = own.num_ues();
    let mut r = CMat::from_diagonal_element(n, n, Complex64::from(noise_var));
    add_gram(&mut r, &own.err, own_precoder, rho, ledger);
    for intf in interferers {
        add_gram(&mut r, &intf.block.hat, &intf.precoder, rho, ledger);
        add_gram(&mut r, &intf.block.err, &intf.precoder, rho, ledger);
    }
    r
}

/// Sum-rate of one cluster's users given its own channels and precoder and
/// the other clusters' interference.
pub fn cluster_rate(
    own: &ChannelBlock,
    own_precoder: &CMat,
    interferers: &[Interferer],
    rho: f64,
    noise_var: f64,
    ledger: &mut CostLedger,
) -> Result<f64> {
    let n = own.num_ues();
    if own_precoder.shape() != (own.num_aps(), n) {
        return Err(Error::Dimension(format!(
            "precoder is {:?}, channel block is {:?}",
            own_precoder.shape(),
            own.hat.shape()
        )));
    }
    for intf in interferers {
        if intf.block.num_ues() != n || intf.block.num_aps() != intf.precoder.nrows() {
            return Err(Error::Dimension(format!(
                "interfering block {:?} does not fit precoder {:?} and {n} users",
                intf.block.hat.shape(),
                intf.precoder.shape()
            )));
        }
    }
    if n == 0 {
        return Ok(0.0);
    }
    if !(noise_var > 0.0) {
        return Err(Error::InvalidParameter("noise variance must be positive".into()));
    }
    let finite = linalg::is_finite(&own.hat)
        && linalg::is_finite(&own.err)
        && linalg::is_finite(own_precoder)
        && interferers
            .iter()
            .all(|i| linalg::is_finite(&i.block.hat) && linalg::is_finite(&i.block.err) && linalg::is_finite(&i.precoder));
    if !finite {
        return Err(Error::NonFinite("channel or precoder entries".into()));
    }

    let mut signal = CMat::zeros(n, n);
    add_gram(&mut signal, &own.hat, own_precoder, rho, ledger);
    let r = interference_covariance(own, own_precoder, interferers, rho, noise_var, ledger);
    let r_inv = linalg::hpd_inverse(&r, ledger)
        .ok_or_else(|| Error::NonFinite("interference covariance is not positive definite".into()))?;
    let mut a = linalg::matmul(&signal, &r_inv, ledger);
    for i in 0..n {
        a[(i, i)] += Complex64::from(1.0);
    }
    let rate = linalg::log2_abs_det(&a, ledger);
    if !rate.is_finite() {
        return Err(Error::NonFinite("sum-rate determinant".into()));
    }
    Ok(rate)
}

/// CF sum-rate; the context must hold exactly one cluster.
pub fn sum_rate_cf(ctx: &RateContext, ledger: &mut CostLedger) -> Result<f64> {
    if ctx.num_clusters() != 1 {
        return Err(Error::Dimension(format!(
            "CF sum-rate needs a single cluster, got {}",
            ctx.num_clusters()
        )));
    }
    sum_rate_cluster(ctx, 0, ledger)
}

pub fn sum_rate_cluster(ctx: &RateContext, c: usize, ledger: &mut CostLedger) -> Result<f64> {
    ctx.validate()?;
    if c >= ctx.num_clusters() {
        return Err(Error::Dimension(format!(
            "cluster {c} out of range ({} clusters)",
            ctx.num_clusters()
        )));
    }
    cluster_rate(
        &ctx.blocks[c][c],
        &ctx.precoders[c],
        &ctx.interferers(c),
        ctx.rho,
        ctx.noise_var,
        ledger,
    )
}

/// Per-cluster rates, in cluster order.
pub fn cluster_rates(ctx: &RateContext, ledger: &mut CostLedger) -> Result<Vec<f64>> {
    (0..ctx.num_clusters())
        .map(|c| sum_rate_cluster(ctx, c, ledger))
        .collect()
}

pub fn sum_rate_network(ctx: &RateContext, ledger: &mut CostLedger) -> Result<f64> {
    Ok(cluster_rates(ctx, ledger)?.iter().sum())
}
