//! Gradient-descent power allocation on the expected MSE between transmitted
//! and received symbols.
//!
//! With `E = G_hat^T W` (users x users) and `F = G_err^T P_c`, the expected
//! error of one cluster is
//!
//! ```text
//! E[eps] = || I - sqrt(rho) E diag(d) - sqrt(rho) F ||_F^2
//!        + rho sum_{i != c} (||G_hat_ic^T P_i||_F^2 + ||G_err_ic^T P_i||_F^2)
//!        + n_c sigma_w^2
//! ```
//!
//! where `P_c` in the CSI-error term is the current precoder, held fixed when
//! differentiating. The gradient with respect to `d` is
//!
//! ```text
//! 2 rho diag(E^H E) d - 2 sqrt(rho) Re diag(E) + 2 rho Re diag(E^H F)
//! ```
//!
//! Each iteration takes a step against it, clamps negative amplitudes to zero
//! and rescales by `eta` so the full power budget is spent.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelBlock;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::metrics::CostLedger;
use crate::precoding::apply_powers;
use crate::rate::Interferer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GDConfig {
    pub step_size: f64,
    pub max_iters: usize,
    /// Stop once `max_k |d_k(i) - d_k(i-1)|` drops below this.
    pub tolerance: f64,
    /// Power to restore after every step; `None` uses the cluster budget.
    pub target_power: Option<f64>,
}

impl Default for GDConfig {
    fn default() -> Self {
        Self {
            step_size: 1e-3,
            max_iters: 200,
            tolerance: 1e-6,
            target_power: None,
        }
    }
}

impl GDConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size >= 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step size must be finite and >= 0, got {}",
                self.step_size
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidParameter("tolerance must be >= 0".into()));
        }
        if let Some(p) = self.target_power {
            if !(p > 0.0) {
                return Err(Error::InvalidParameter("target power must be > 0".into()));
            }
        }
        Ok(())
    }
}

/// One cluster's power-allocation inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct GdProblem {
    /// `M_c x n_c` normalized weights.
    pub w: CMat,
    /// Channels from the cluster's APs to its scheduled users.
    pub channels: ChannelBlock,
    /// Other clusters' transmissions; they only shift the objective.
    pub interferers: Vec<Interferer>,
    pub rho: f64,
    pub noise_var: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GDTrace {
    /// Amplitudes after each iteration (after clamping and rescaling).
    pub iterates: Vec<Vec<f64>>,
    /// Objective at each recorded iterate.
    pub mse: Vec<f64>,
    pub final_d: Vec<f64>,
    pub iterations_used: usize,
}

/// `G^T W`, users x users.
fn effective(g: &CMat, w: &CMat, ledger: &mut CostLedger) -> CMat {
    linalg::matmul(&g.transpose(), w, ledger)
}

fn gradient_from(eff: &CMat, err_term: &CMat, d: &[f64], rho: f64) -> Vec<f64> {
    let sr = rho.sqrt();
    (0..d.len())
        .map(|k| {
            let gram_kk: f64 = eff.column(k).norm_squared();
            let cross: Complex64 = eff.column(k).dotc(&err_term.column(k));
            2.0 * rho * gram_kk * d[k] - 2.0 * sr * eff[(k, k)].re + 2.0 * rho * cross.re
        })
        .collect()
}

/// Gradient of the expected MSE with respect to the amplitudes `d`, holding
/// the precoder `p_c` of the CSI-error term fixed.
pub fn mse_gradient(
    w: &CMat,
    d: &[f64],
    g_hat: &CMat,
    g_err: &CMat,
    p_c: &CMat,
    rho: f64,
    ledger: &mut CostLedger,
) -> Vec<f64> {
    let eff = effective(g_hat, w, ledger);
    let err_term = effective(g_err, p_c, ledger);
    ledger.charge_cmul((eff.len() * 2) as u64);
    gradient_from(&eff, &err_term, d, rho)
}

/// Expected squared error `E ||x_c - y_c||^2` in closed form.
#[allow(clippy::too_many_arguments)]
pub fn mse_objective(
    w: &CMat,
    d: &[f64],
    g_hat: &CMat,
    g_err: &CMat,
    p_c: &CMat,
    interferers: &[Interferer],
    noise_var: f64,
    rho: f64,
) -> f64 {
    let sr = Complex64::from(rho.sqrt());
    let n = d.len();
    let signal = g_hat.transpose() * apply_powers(w, d) * sr;
    let leak = g_err.transpose() * p_c * sr;
    let residual = CMat::identity(n, n) - signal - leak;
    let interference: f64 = interferers
        .iter()
        .map(|i| {
            rho * ((i.block.hat.transpose() * &i.precoder).norm_squared()
                + (i.block.err.transpose() * &i.precoder).norm_squared())
        })
        .sum();
    residual.norm_squared() + interference + n as f64 * noise_var
}

/// `Tr(W diag(d o d) W^H)`.
pub fn allocated_power(w: &CMat, d: &[f64]) -> f64 {
    w.column_iter()
        .zip(d)
        .map(|(col, &amp)| amp * amp * col.norm_squared())
        .sum()
}

/// Runs the projected, rescaled gradient descent from `d0`.
pub fn gd_allocate(
    problem: &GdProblem,
    config: &GDConfig,
    d0: &[f64],
    power_budget: f64,
    ledger: &mut CostLedger,
) -> Result<GDTrace> {
    config.validate()?;
    let n = problem.w.ncols();
    if d0.len() != n || problem.channels.num_ues() != n {
        return Err(Error::Dimension(format!(
            "{n} weight columns, {} amplitudes, {} users",
            d0.len(),
            problem.channels.num_ues()
        )));
    }
    let target = config.target_power.unwrap_or(power_budget);
    let start = allocated_power(&problem.w, d0);
    if start > target * (1.0 + 1e-12) + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "initial allocation uses {start}, above the target {target}"
        )));
    }

    let (w, rho) = (&problem.w, problem.rho);
    // E = G_hat^T W does not depend on d
    let eff = effective(&problem.channels.hat, w, ledger);
    let err_w = effective(&problem.channels.err, w, ledger);

    let mut d = d0.to_vec();
    let mut trace = GDTrace {
        iterates: Vec::new(),
        mse: Vec::new(),
        final_d: Vec::new(),
        iterations_used: 0,
    };
    for iteration in 1..=config.max_iters {
        // G_err^T W diag(d) = (G_err^T W) diag(d)
        let err_term = apply_powers(&err_w, &d);
        ledger.charge_cmul((err_w.len() + 3 * eff.len()) as u64);
        let grad = gradient_from(&eff, &err_term, &d, rho);
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::PowerAllocation {
                iteration,
                reason: "non-finite gradient".into(),
            });
        }
        let mut next: Vec<f64> = d
            .iter()
            .zip(&grad)
            .map(|(&dk, &gk)| (dk - config.step_size * gk).max(0.0))
            .collect();
        let spent = allocated_power(w, &next);
        ledger.charge_real((6 * n) as u64);
        if !(spent > 0.0 && spent.is_finite()) {
            return Err(Error::PowerAllocation {
                iteration,
                reason: format!("allocation collapsed (power {spent})"),
            });
        }
        let eta = (target / spent).sqrt();
        next.iter_mut().for_each(|v| *v *= eta);

        let change = next
            .iter()
            .zip(&d)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let p_next = apply_powers(w, &next);
        trace.mse.push(mse_objective(
            w,
            &next,
            &problem.channels.hat,
            &problem.channels.err,
            &p_next,
            &problem.interferers,
            problem.noise_var,
            rho,
        ));
        trace.iterates.push(next.clone());
        trace.iterations_used = iteration;
        d = next;
        if change < config.tolerance {
            break;
        }
    }
    trace.final_d = d;
    Ok(trace)
}
