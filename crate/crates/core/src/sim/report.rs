//! Signaling-load and FLOP comparison between CF and CLCF pipelines.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrics::Breakdown;
use crate::sim::config::{Mode, SimConfig};
use crate::sim::trial::{build_instance, evaluate_point};

/// Network size for one report line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSize {
    pub m: usize,
    pub k: usize,
    pub n: usize,
}

/// The two network sizes of the reference comparison.
pub const REFERENCE_SIZES: [ProblemSize; 2] = [
    ProblemSize { m: 64, k: 16, n: 8 },
    ProblemSize { m: 128, k: 256, n: 128 },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub size: ProblemSize,
    pub mode: Mode,
    /// Fitted model: three scalars per AP-UE pair that shares a cluster.
    pub signaling: u64,
    pub flops: u64,
    pub breakdown: Breakdown,
}

/// Instrumented cost of one trial at a single SNR point.
pub fn measure_cost(base: &SimConfig, size: ProblemSize, mode: Mode, snr_db: f64) -> Result<CostRow> {
    let mut cfg = base.clone();
    cfg.mode = mode;
    cfg.m = size.m;
    cfg.k = size.k;
    cfg.n = size.n;
    cfg.counters = true;
    cfg.trials = 1;
    cfg.snr_grid = vec![snr_db];
    cfg.validate()?;
    let instance = build_instance(&cfg, 0)?;
    let outcome = evaluate_point(&cfg, &instance, snr_db)?;
    Ok(CostRow {
        size,
        mode,
        signaling: outcome.ledger.signaling(),
        flops: outcome.ledger.flops(),
        breakdown: outcome.ledger.breakdown(),
    })
}

/// CF and CLCF rows for every size, CF first.
pub fn cost_report(base: &SimConfig, sizes: &[ProblemSize], snr_db: f64) -> Result<Vec<CostRow>> {
    let mut rows = Vec::with_capacity(2 * sizes.len());
    for &size in sizes {
        for mode in [Mode::Cf, Mode::Clcf] {
            rows.push(measure_cost(base, size, mode, snr_db)?);
        }
    }
    Ok(rows)
}

/// CF-over-CLCF FLOP ratio for each size in a report.
pub fn flop_ratios(rows: &[CostRow]) -> Vec<(ProblemSize, f64)> {
    rows.chunks(2)
        .filter_map(|pair| match pair {
            [cf, clcf] if cf.mode == Mode::Cf && clcf.mode == Mode::Clcf && clcf.flops > 0 => {
                Some((cf.size, cf.flops as f64 / clcf.flops as f64))
            }
            _ => None,
        })
        .collect()
}

pub fn format_report(rows: &[CostRow]) -> String {
    let mut out = String::from("M,K,n,mode,signaling_model,flops,flops_scheduling,flops_precoding,flops_power\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.size.m,
            r.size.k,
            r.size.n,
            r.mode.label(),
            r.signaling,
            r.flops,
            r.breakdown.scheduling,
            r.breakdown.precoding,
            r.breakdown.power_allocation
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_size_signaling_matches_model() {
        let base = SimConfig::default();
        let size = REFERENCE_SIZES[0];
        let cf = measure_cost(&base, size, Mode::Cf, 10.0).unwrap();
        let clcf = measure_cost(&base, size, Mode::Clcf, 10.0).unwrap();
        assert_eq!(cf.signaling, 3072);
        assert_eq!(clcf.signaling, 768);
        assert_eq!(cf.breakdown.total(), cf.flops);
        assert!(clcf.flops > 0 && cf.flops > clcf.flops);
        let ratios = flop_ratios(&[cf, clcf]);
        assert_eq!(ratios.len(), 1);
    }
}
