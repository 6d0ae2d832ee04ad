use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::config::SimConfig;
use crate::sim::trial::{run_trial, TrialRecord, TrialStatus};

/// Mean network sum-rate at one SNR point over the successful trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub snr_db: f64,
    pub mean_rate: f64,
    /// Sample standard deviation (`n - 1` denominator); zero for one trial.
    pub std_rate: f64,
    pub n_ok: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Trial-major, SNR-minor order.
    pub records: Vec<TrialRecord>,
    pub aggregate: Vec<AggregateRow>,
    pub failed: usize,
}

/// Runs every trial on `workers` threads. The output does not depend on the
/// worker count: trials are independent and reduced in index order.
pub fn run_sweep(config: &SimConfig, workers: usize) -> Result<SweepResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let per_trial: Vec<Vec<TrialRecord>> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, t))
            .collect::<Result<Vec<_>>>()
    })?;
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    let aggregate = aggregate(&config.snr_grid, &records);
    let failed = records
        .iter()
        .filter(|r| r.status == TrialStatus::Failed)
        .count();
    Ok(SweepResult {
        records,
        aggregate,
        failed,
    })
}

/// Per-SNR statistics in grid order. Failed records are excluded.
pub fn aggregate(snr_grid: &[f64], records: &[TrialRecord]) -> Vec<AggregateRow> {
    snr_grid
        .iter()
        .map(|&snr| {
            let rates: Vec<f64> = records
                .iter()
                .filter(|r| r.snr_db.to_bits() == snr.to_bits() && r.status == TrialStatus::Ok)
                .map(|r| r.sum_rate)
                .collect();
            let n = rates.len();
            let mean = if n == 0 {
                f64::NAN
            } else {
                rates.iter().sum::<f64>() / n as f64
            };
            let std = if n < 2 {
                0.0
            } else {
                (rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            };
            AggregateRow {
                snr_db: snr,
                mean_rate: mean,
                std_rate: std,
                n_ok: n,
            }
        })
        .collect()
}
