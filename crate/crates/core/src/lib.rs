//! Downlink cell-free (CF) and clustered cell-free (CLCF) massive MIMO
//! link-level simulator.
//!
//! The pipeline per cluster is: draw a topology and imperfect-CSI channels,
//! schedule users (IGSS, greedy ZF or exhaustive search), precode (ZF or
//! MMSE), allocate power (equal load or MSE gradient descent) and evaluate
//! the network sum-rate with all intra- and inter-cluster interference.
//! Every stage is a pure function of its seed and parameters.

pub mod channel;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod powerctl;
pub mod precoding;
pub mod rate;
pub mod scheduling;
pub mod sim;
pub mod topology;

pub use channel::{draw_channels, large_scale_coeff, path_loss_db, ChannelBlock, ChannelSet, LargeScaleModel};
pub use error::{Error, Result};
pub use linalg::CMat;
pub use metrics::{signaling_load, Breakdown, CostLedger, Phase};
pub use powerctl::{gd_allocate, mse_gradient, mse_objective, GDConfig, GDTrace, GdProblem};
pub use precoding::{apply_powers, equal_power_load, mmse_weights, zf_weights, Precoder, PrecoderKind};
pub use rate::{cluster_rate, sum_rate_cf, sum_rate_cluster, sum_rate_network, Interferer, RateContext};
pub use scheduling::{
    exhaustive_schedule, greedy_first_set, greedy_zf_schedule, igss_schedule, ClusterProblem, ScheduleResult,
    SchedulerKind,
};
pub use sim::{
    emit_csv, noise_variance, run_sweep, run_trial, AggregateRow, Mode, PowerRule, SimConfig, SweepResult,
    TrialRecord, TrialStatus,
};
pub use topology::{generate_topology, NetworkTopology, Point, Region};

pub use num_complex::Complex64;

// Lets the shared test oracles name this crate the same way from unit and
// integration tests.
#[cfg(test)]
extern crate self as cfmimo_core;

#[cfg(test)]
#[path = "../tests/common/mod.rs"]
mod oracle;

#[cfg(test)]
mod tests;
