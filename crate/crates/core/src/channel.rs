//! Large-scale fading, Rayleigh small-scale fading, and the imperfect-CSI split.
//!
//! Path loss follows a three-slope model in dB with distances in meters:
//!
//! ```text
//! PL(d) = -D - 35 log10(d)                  d > d1
//!       = -D - 10 log10(d1^1.5 d^2)         d0 < d <= d1
//!       = -D - 10 log10(d1^1.5 d0^2)        d <= d0
//! ```
//!
//! and the large-scale coefficient is `beta = 10^((PL + sigma_sh z) / 10)`,
//! where log-normal shadowing only applies beyond `d1`.
//!
//! The channel estimate and error are drawn independently as
//! `g_hat ~ CN(0, (1 - tau) beta)` and `g_err ~ CN(0, tau beta)`, so the true
//! channel `g = g_hat + g_err` keeps `E|g|^2 = beta`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{select_columns, select_rows, CMat};
use crate::topology::{distance, NetworkTopology};

/// RNG stream used for channel draws; topology placement uses stream 0.
const CHANNEL_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeScaleModel {
    pub carrier_freq_mhz: f64,
    pub h_ap: f64,
    pub h_ue: f64,
    pub d0: f64,
    pub d1: f64,
    pub sigma_sh_db: f64,
}

impl Default for LargeScaleModel {
    fn default() -> Self {
        Self {
            carrier_freq_mhz: 1900.0,
            h_ap: 15.0,
            h_ue: 1.5,
            d0: 10.0,
            d1: 50.0,
            sigma_sh_db: 8.0,
        }
    }
}

impl LargeScaleModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.carrier_freq_mhz, self.h_ap, self.h_ue, self.d0, self.d1];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "large-scale model parameters must be positive: {self:?}"
            )));
        }
        if self.d0 >= self.d1 {
            return Err(Error::InvalidParameter(format!(
                "breakpoints must satisfy d0 < d1 (d0={}, d1={})",
                self.d0, self.d1
            )));
        }
        if !(self.sigma_sh_db.is_finite() && self.sigma_sh_db >= 0.0) {
            return Err(Error::InvalidParameter("shadowing std must be >= 0".into()));
        }
        Ok(())
    }

    /// The frequency and antenna-height dependent offset `D` in dB.
    pub fn offset_db(&self) -> f64 {
        let lf = self.carrier_freq_mhz.log10();
        46.3 + 33.9 * lf - 13.82 * self.h_ap.log10() - (1.11 * lf - 0.7) * self.h_ue + 1.56 * lf
            - 0.8
    }
}

/// Three-slope path loss in dB (negative for realistic parameters).
pub fn path_loss_db(model: &LargeScaleModel, d: f64) -> f64 {
    let offset = model.offset_db();
    if d > model.d1 {
        -offset - 35.0 * d.log10()
    } else if d > model.d0 {
        -offset - 10.0 * (model.d1.powf(1.5) * d * d).log10()
    } else {
        -offset - 10.0 * (model.d1.powf(1.5) * model.d0 * model.d0).log10()
    }
}

/// Linear-scale large-scale coefficient for a standard-normal shadowing draw `z`.
pub fn large_scale_coeff(model: &LargeScaleModel, d: f64, z: f64) -> f64 {
    let shadow = if d > model.d1 {
        model.sigma_sh_db * z
    } else {
        0.0
    };
    10f64.powf((path_loss_db(model, d) + shadow) / 10.0)
}

/// Estimate and error channels for one AP group towards one UE group.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBlock {
    pub hat: CMat,
    pub err: CMat,
}

impl ChannelBlock {
    pub fn columns(&self, cols: &[usize]) -> ChannelBlock {
        ChannelBlock {
            hat: select_columns(&self.hat, cols),
            err: select_columns(&self.err, cols),
        }
    }

    pub fn num_aps(&self) -> usize {
        self.hat.nrows()
    }

    pub fn num_ues(&self) -> usize {
        self.hat.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// `M x K` linear large-scale coefficients.
    pub beta: DMatrix<f64>,
    pub g: CMat,
    pub g_hat: CMat,
    pub g_err: CMat,
    pub tau: f64,
}

impl ChannelSet {
    pub fn num_aps(&self) -> usize {
        self.beta.nrows()
    }

    pub fn num_ues(&self) -> usize {
        self.beta.ncols()
    }

    /// Channels from the APs `aps` to the UEs `ues`, rows and columns in the
    /// given order.
    pub fn block(&self, aps: &[usize], ues: &[usize]) -> ChannelBlock {
        ChannelBlock {
            hat: select_columns(&select_rows(&self.g_hat, aps), ues),
            err: select_columns(&select_rows(&self.g_err, aps), ues),
        }
    }

    /// Divides every large-scale coefficient by their mean (and the channel
    /// amplitudes by its square root), so the average pair gain is one.
    /// Returns the mean that was removed.
    pub fn normalize_gain(&mut self, target_mean: f64) -> f64 {
        let mean = self.beta.mean();
        if mean > 0.0 && mean.is_finite() {
            let scale = target_mean / mean;
            let amp = scale.sqrt();
            self.beta *= scale;
            self.g *= Complex64::from(amp);
            self.g_hat *= Complex64::from(amp);
            self.g_err *= Complex64::from(amp);
        }
        mean
    }
}

fn complex_normal(rng: &mut ChaCha8Rng, variance: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (variance / 2.0).sqrt()
}

/// Draws the full `M x K` channel for a topology. Cross-cluster pairs are
/// included; use [`ChannelSet::block`] to slice per cluster pair.
pub fn draw_channels(
    seed: u64,
    topology: &NetworkTopology,
    model: &LargeScaleModel,
    tau: f64,
) -> Result<ChannelSet> {
    model.validate()?;
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!(
            "CSI error fraction must lie in [0, 1), got {tau}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(CHANNEL_STREAM);

    let (m, k) = (topology.num_aps(), topology.num_ues());
    let mut beta = DMatrix::<f64>::zeros(m, k);
    let mut g_hat = CMat::zeros(m, k);
    let mut g_err = CMat::zeros(m, k);
    for (ap, &ap_pos) in topology.ap_positions.iter().enumerate() {
        for (ue, &ue_pos) in topology.ue_positions.iter().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            let b = large_scale_coeff(model, distance(ap_pos, ue_pos), z);
            beta[(ap, ue)] = b;
            g_hat[(ap, ue)] = complex_normal(&mut rng, (1.0 - tau) * b);
            g_err[(ap, ue)] = complex_normal(&mut rng, tau * b);
        }
    }
    let g = &g_hat + &g_err;
    Ok(ChannelSet {
        beta,
        g,
        g_hat,
        g_err,
        tau,
    })
}
