use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use cfmimo_core::sim::output::{aggregate_csv, aggregate_path, records_csv};
use cfmimo_core::sim::report::{cost_report, flop_ratios, format_report, REFERENCE_SIZES};
use cfmimo_core::{emit_csv, run_sweep, run_trial, Error, SimConfig};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "cfmimo", version, about = "Cell-free / clustered cell-free massive MIMO downlink simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every trial at every SNR point and write the record CSV plus its
    /// `.agg.csv` aggregate.
    Sweep(Common),
    /// Dump all records of one trial as JSON.
    Trial {
        #[command(flatten)]
        common: Common,
        /// Trial index (seed = base_seed + index).
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Signaling load and FLOP counts for CF vs CLCF at the reference sizes.
    Table2 {
        #[command(flatten)]
        common: Common,
        /// Only the small (M=64, K=16, n=8) size; the large one takes minutes.
        #[arg(long)]
        small_only: bool,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config file; keys are SimConfig field names.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; trial t uses seed + t.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the trial loop.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    /// CF or CLCF.
    #[arg(long)]
    mode: Option<String>,
    /// IGSS, GREEDY_ZF or EXHAUSTIVE.
    #[arg(long)]
    scheduler: Option<String>,
    /// Power rule: EPL or GD.
    #[arg(long)]
    power: Option<String>,
    /// ZF or MMSE.
    #[arg(long)]
    precoder: Option<String>,
    /// Fraction of the large-scale gain in the CSI error.
    #[arg(long)]
    tau: Option<f64>,
}

impl Common {
    fn load_config(&self) -> Result<SimConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                serde_json::from_str::<SimConfig>(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => SimConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.base_seed = seed;
        }
        if let Some(snr) = &self.snr {
            cfg.snr_grid = snr.clone();
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(mode) = &self.mode {
            cfg.mode = mode.parse()?;
        }
        if let Some(s) = &self.scheduler {
            cfg.scheduler = s.parse()?;
        }
        if let Some(p) = &self.power {
            cfg.power_rule = p.parse()?;
        }
        if let Some(p) = &self.precoder {
            cfg.precoder = p.parse()?;
        }
        if let Some(tau) = self.tau {
            cfg.tau = tau;
        }
        if self.workers == 0 {
            return Err(Error::Config("--workers must be >= 1".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing to stdout"),
    }
}

fn sweep(common: &Common) -> Result<()> {
    let cfg = common.load_config()?;
    let result = run_sweep(&cfg, common.workers)?;
    match &common.out {
        Some(path) => {
            emit_csv(&result.records, path)?;
            eprintln!(
                "wrote {} records to {} and {}",
                result.records.len(),
                path.display(),
                aggregate_path(path).display()
            );
        }
        None => write_output(None, &records_csv(&result.records))?,
    }
    eprint!("{}", aggregate_csv(&result.aggregate));
    eprintln!("failed records: {}", result.failed);
    Ok(())
}

fn trial(common: &Common, index: usize) -> Result<()> {
    let cfg = common.load_config()?;
    let records = run_trial(&cfg, index)?;
    let mut text = serde_json::to_string_pretty(&records).context("serializing trial records")?;
    text.push('\n');
    write_output(common.out.as_deref(), &text)
}

fn table2(common: &Common, small_only: bool) -> Result<()> {
    let cfg = common.load_config()?;
    let sizes = if small_only { &REFERENCE_SIZES[..1] } else { &REFERENCE_SIZES[..] };
    let snr = common.snr.as_ref().and_then(|s| s.first().copied()).unwrap_or(10.0);
    let rows = cost_report(&cfg, sizes, snr)?;
    write_output(common.out.as_deref(), &format_report(&rows))?;
    for (size, ratio) in flop_ratios(&rows) {
        eprintln!("M={} K={} n={}: CF/CLCF FLOP ratio {ratio:.2}", size.m, size.k, size.n);
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_)) | Some(Error::InvalidParameter(_)) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sweep(common) => sweep(common),
        Command::Trial { common, index } => trial(common, *index),
        Command::Table2 { common, small_only } => table2(common, *small_only),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
