//! Experiment orchestration: configuration, trials, sweeps and reports.

pub mod config;
pub mod output;
pub mod report;
pub mod sweep;
pub mod trial;

pub use config::{noise_variance, Mode, PowerRule, SimConfig};
pub use output::{aggregate_csv, aggregate_path, emit_csv, format_float, parse_records_csv, records_csv, CsvRow};
pub use report::{cost_report, flop_ratios, measure_cost, CostRow, ProblemSize, REFERENCE_SIZES};
pub use sweep::{aggregate, run_sweep, AggregateRow, SweepResult};
pub use trial::{build_instance, evaluate_point, run_trial, TrialInstance, TrialRecord, TrialStatus};
