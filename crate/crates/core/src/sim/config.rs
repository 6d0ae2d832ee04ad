use serde::{Deserialize, Serialize};

use crate::channel::LargeScaleModel;
use crate::error::{Error, Result};
use crate::powerctl::GDConfig;
use crate::precoding::PrecoderKind;
use crate::scheduling::{SchedulerKind, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Mode {
    Cf,
    Clcf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PowerRule {
    Epl,
    Gd,
}

macro_rules! label_impl {
    ($ty:ty { $($variant:path => $label:literal),+ $(,)? }) => {
        impl $ty {
            pub fn label(&self) -> &'static str {
                match self { $($variant => $label),+ }
            }
        }

        impl std::str::FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_uppercase().replace('-', "_").as_str() {
                    $($label => Ok($variant),)+
                    _ => Err(Error::Config(format!(
                        "unknown value {s:?}, expected one of {}",
                        [$($label),+].join(", ")
                    ))),
                }
            }
        }
    };
}

label_impl!(Mode { Mode::Cf => "CF", Mode::Clcf => "CLCF" });
label_impl!(PowerRule { PowerRule::Epl => "EPL", PowerRule::Gd => "GD" });
label_impl!(PrecoderKind { PrecoderKind::Zf => "ZF", PrecoderKind::Mmse => "MMSE" });
label_impl!(SchedulerKind {
    SchedulerKind::Igss => "IGSS",
    SchedulerKind::GreedyZf => "GREEDY_ZF",
    SchedulerKind::Exhaustive => "EXHAUSTIVE",
});

/// Experiment configuration. Serialized as a flat JSON object whose keys are
/// the field names; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub mode: Mode,
    /// Total number of APs.
    pub m: usize,
    /// Total number of UEs.
    pub k: usize,
    /// Total number of scheduled UEs, split evenly over clusters.
    pub n: usize,
    /// Number of clusters in CLCF mode (CF always uses one).
    pub c: usize,
    pub side_length: f64,
    pub snr_grid: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub precoder: PrecoderKind,
    pub scheduler: SchedulerKind,
    pub power_rule: PowerRule,
    pub tau: f64,
    pub gd: GDConfig,
    pub counters: bool,
    /// Per-antenna symbol energy `P_s`; also used as `rho_f`.
    pub symbol_power: f64,
    /// Rescale large-scale gains per trial so their mean over all AP-UE
    /// pairs equals this value; `null` keeps the raw path-loss gains.
    pub mean_gain: Option<f64>,
    pub enumeration_cap: u128,
    pub large_scale: LargeScaleModel,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Clcf,
            m: 64,
            k: 128,
            n: 24,
            c: 4,
            side_length: 400.0,
            snr_grid: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            trials: 200,
            base_seed: 0,
            precoder: PrecoderKind::Mmse,
            scheduler: SchedulerKind::Igss,
            power_rule: PowerRule::Gd,
            tau: 0.1,
            gd: GDConfig::default(),
            counters: false,
            symbol_power: 1.0,
            mean_gain: Some(1.0),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            large_scale: LargeScaleModel::default(),
        }
    }
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Clusters actually simulated: one in CF mode.
    pub fn clusters(&self) -> usize {
        match self.mode {
            Mode::Cf => 1,
            Mode::Clcf => self.c,
        }
    }

    pub fn scheduled_per_cluster(&self) -> usize {
        self.n / self.clusters()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        let c = self.clusters();
        if c != 1 && c != 4 {
            return fail(format!("cluster count must be 1 or 4, got {c}"));
        }
        if self.m == 0 || self.k == 0 || self.n == 0 {
            return fail("m, k and n must all be positive".into());
        }
        if self.m % c != 0 || self.k % c != 0 || self.n % c != 0 {
            return fail(format!(
                "m={}, k={} and n={} must be divisible by the cluster count {c}",
                self.m, self.k, self.n
            ));
        }
        if self.n > self.k {
            return fail(format!("cannot schedule n={} of k={} users", self.n, self.k));
        }
        if self.snr_grid.is_empty() || self.snr_grid.iter().any(|s| !s.is_finite()) {
            return fail("snr_grid must be a non-empty list of finite values".into());
        }
        if self.trials == 0 {
            return fail("trials must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.tau) {
            return fail(format!("tau must lie in [0, 1), got {}", self.tau));
        }
        if !(self.side_length > 0.0 && self.side_length.is_finite()) {
            return fail("side_length must be positive".into());
        }
        if let Some(g) = self.mean_gain {
            if !(g > 0.0 && g.is_finite()) {
                return fail(format!("mean_gain must be positive, got {g}"));
            }
        }
        if !(self.symbol_power > 0.0 && self.symbol_power.is_finite()) {
            return fail("symbol_power must be positive".into());
        }
        self.gd.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.large_scale
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }
}

/// `sigma_w^2 = M P_s / 10^(snr/10)`: SNR is total transmit power over noise.
pub fn noise_variance(snr_db: f64, m: usize, symbol_power: f64) -> f64 {
    m as f64 * symbol_power / 10f64.powf(snr_db / 10.0)
}
