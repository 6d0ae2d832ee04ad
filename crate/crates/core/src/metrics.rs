//! FLOP and fronthaul signaling accounting.
//!
//! Costs are charged by formula rather than measured: a complex multiply is
//! six real FLOPs and a complex add two. A dense `(a x b)(b x c)` product is
//! `a*c*b` complex multiplies plus `a*c*(b-1)` complex adds. An `n x n`
//! inversion is charged as `(8/3) n^3` complex multiplies and a
//! factorization-based determinant as `(2/3) n^3`.
//!
//! The signaling load is a fitted model of three real scalars exchanged per
//! served AP/UE pair. It reproduces the published CF/CLCF reference counts but
//! is not derived from a fronthaul protocol.

use serde::{Deserialize, Serialize};

use crate::topology::NetworkTopology;

pub const FLOPS_PER_CMUL: u64 = 6;
pub const FLOPS_PER_CADD: u64 = 2;
/// Real scalars per AP/UE pair in the signaling model.
pub const SIGNALING_SCALARS_PER_PAIR: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    #[default]
    Scheduling,
    Precoding,
    PowerAllocation,
}

/// Per-phase FLOP totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Breakdown {
    pub scheduling: u64,
    pub precoding: u64,
    pub power_allocation: u64,
}

impl Breakdown {
    pub fn total(&self) -> u64 {
        self.scheduling + self.precoding + self.power_allocation
    }
}

/// Trial-local cost accumulator.
///
/// A disabled ledger accepts every charge and records nothing, so
/// instrumented code paths never branch on whether counting is on.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    enabled: bool,
    phase: Phase,
    breakdown: Breakdown,
    signaling: u64,
}

impl CostLedger {
    pub fn new(enabled: bool) -> Self {
        Self {
            enabled,
            ..Self::default()
        }
    }

    pub fn disabled() -> Self {
        Self::new(false)
    }

    pub fn enabled() -> Self {
        Self::new(true)
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    /// A fresh ledger with the same enablement and phase, for a sub-task
    /// whose counts are merged back later.
    pub fn fork(&self) -> Self {
        Self {
            enabled: self.enabled,
            phase: self.phase,
            ..Self::default()
        }
    }

    pub fn merge(&mut self, other: &CostLedger) {
        if !self.enabled {
            return;
        }
        self.breakdown.scheduling += other.breakdown.scheduling;
        self.breakdown.precoding += other.breakdown.precoding;
        self.breakdown.power_allocation += other.breakdown.power_allocation;
        self.signaling += other.signaling;
    }

    pub fn charge(&mut self, flops: u64) {
        if !self.enabled {
            return;
        }
        let slot = match self.phase {
            Phase::Scheduling => &mut self.breakdown.scheduling,
            Phase::Precoding => &mut self.breakdown.precoding,
            Phase::PowerAllocation => &mut self.breakdown.power_allocation,
        };
        *slot += flops;
    }

    pub fn charge_cmul(&mut self, count: u64) {
        self.charge(count * FLOPS_PER_CMUL);
    }

    pub fn charge_cadd(&mut self, count: u64) {
        self.charge(count * FLOPS_PER_CADD);
    }

    /// Real-valued operations (norms of magnitudes, scalar updates).
    pub fn charge_real(&mut self, count: u64) {
        self.charge(count);
    }

    pub fn charge_matmul(&mut self, a: usize, b: usize, c: usize) {
        let (a, b, c) = (a as u64, b as u64, c as u64);
        self.charge_cmul(a * c * b);
        self.charge_cadd(a * c * b.saturating_sub(1));
    }

    pub fn charge_inverse(&mut self, n: usize) {
        // (8/3) n^3 complex multiplies = 16 n^3 real FLOPs
        let n = n as u64;
        self.charge(16 * n * n * n);
    }

    pub fn charge_determinant(&mut self, n: usize) {
        // (2/3) n^3 complex multiplies = 4 n^3 real FLOPs
        let n = n as u64;
        self.charge(4 * n * n * n);
    }

    pub fn add_signaling(&mut self, load: u64) {
        if self.enabled {
            self.signaling += load;
        }
    }

    pub fn breakdown(&self) -> Breakdown {
        self.breakdown
    }

    pub fn flops(&self) -> u64 {
        self.breakdown.total()
    }

    pub fn signaling(&self) -> u64 {
        self.signaling
    }
}

/// Fronthaul signaling load: `3 * sum_c M_c * K_c`.
///
/// With a single cluster this is `3 * M * K`.
pub fn signaling_load(topology: &NetworkTopology) -> u64 {
    (0..topology.num_clusters())
        .map(|c| {
            let m = topology.cluster_aps(c).len() as u64;
            let k = topology.cluster_ues(c).len() as u64;
            SIGNALING_SCALARS_PER_PAIR * m * k
        })
        .sum()
}
