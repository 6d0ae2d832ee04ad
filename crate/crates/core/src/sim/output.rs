//! CSV emission for sweep records and their per-SNR aggregate.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sim::sweep::{aggregate, AggregateRow};
use crate::sim::trial::TrialRecord;

pub const RECORD_COLUMNS: [&str; 11] = [
    "trial",
    "seed",
    "snr_db",
    "mode",
    "scheduler",
    "power_rule",
    "sum_rate",
    "flops",
    "signaling",
    "gd_iters",
    "status",
];

pub const AGGREGATE_COLUMNS: [&str; 4] = ["snr_db", "mean_rate", "std_rate", "n_ok"];

const SIGNIFICANT_DIGITS: i32 = 12;

/// Plain decimal with at least 12 significant digits. Falls back to the
/// shortest exact representation when 12 digits would not round-trip.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", (SIGNIFICANT_DIGITS - 1) as usize, 0.0);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (SIGNIFICANT_DIGITS - 1 - magnitude).max(0) as usize;
    let fixed = format!("{x:.decimals$}");
    if fixed.parse::<f64>().ok() == Some(x) {
        fixed
    } else {
        format!("{x}")
    }
}

/// `runs/out.csv` → `runs/out.agg.csv`; a missing `.csv` extension is kept.
pub fn aggregate_path(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let stem = name.strip_suffix(".csv").unwrap_or(&name);
    path.with_file_name(format!("{stem}.agg.csv"))
}

pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut out = RECORD_COLUMNS.join(",");
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.seed,
            format_float(r.snr_db),
            r.mode.label(),
            r.scheduler.label(),
            r.power_rule.label(),
            format_float(r.sum_rate),
            r.flops,
            r.signaling,
            r.gd_iters,
            r.status.label(),
        );
    }
    out
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = AGGREGATE_COLUMNS.join(",");
    out.push('\n');
    for a in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_float(a.snr_db),
            format_float(a.mean_rate),
            format_float(a.std_rate),
            a.n_ok
        );
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes the record table to `path` and the per-SNR aggregate beside it.
/// The aggregate covers the SNR values in order of first appearance.
pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    let mut grid: Vec<f64> = Vec::new();
    for r in records {
        if !grid.iter().any(|g| g.to_bits() == r.snr_db.to_bits()) {
            grid.push(r.snr_db);
        }
    }
    write_file(path, &records_csv(records))?;
    write_file(&aggregate_path(path), &aggregate_csv(&aggregate(&grid, records)))
}

/// One parsed row of a record CSV, kept as raw strings except for numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub trial: usize,
    pub seed: u64,
    pub snr_db: f64,
    pub mode: String,
    pub scheduler: String,
    pub power_rule: String,
    pub sum_rate: f64,
    pub flops: u64,
    pub signaling: u64,
    pub gd_iters: usize,
    pub status: String,
}

/// Parses the output of [`records_csv`]; the header must match exactly.
pub fn parse_records_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != RECORD_COLUMNS.join(",") {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    let bad = |line: &str| Error::Config(format!("malformed CSV row {line:?}"));
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != RECORD_COLUMNS.len() {
                return Err(bad(line));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(line));
            let int = |s: &str| s.parse::<u64>().map_err(|_| bad(line));
            Ok(CsvRow {
                trial: int(f[0])? as usize,
                seed: int(f[1])?,
                snr_db: num(f[2])?,
                mode: f[3].to_string(),
                scheduler: f[4].to_string(),
                power_rule: f[5].to_string(),
                sum_rate: num(f[6])?,
                flops: int(f[7])?,
                signaling: int(f[8])?,
                gd_iters: int(f[9])? as usize,
                status: f[10].to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn significant_digits(s: &str) -> usize {
        s.trim_start_matches('-')
            .chars()
            .filter(|c| c.is_ascii_digit())
            .collect::<String>()
            .trim_start_matches('0')
            .len()
    }

    #[test]
    fn floats_keep_twelve_digits_and_roundtrip() {
        for x in [12.5, 1.0 / 3.0, -7.25e-9, 123456789.0, 6.4, 1e21, std::f64::consts::PI] {
            let s = format_float(x);
            assert!(!s.contains('e'), "{s}");
            assert!(significant_digits(&s) >= 12, "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_float(f64::NAN), "NaN");
        assert_eq!(format_float(0.0), "0.00000000000");
    }

    #[test]
    fn aggregate_sibling_path() {
        assert_eq!(aggregate_path(Path::new("a/b/out.csv")), PathBuf::from("a/b/out.agg.csv"));
        assert_eq!(aggregate_path(Path::new("out")), PathBuf::from("out.agg.csv"));
    }

    #[test]
    fn empty_records_give_header_only() {
        assert_eq!(records_csv(&[]), format!("{}\n", RECORD_COLUMNS.join(",")));
        assert!(parse_records_csv(&records_csv(&[])).unwrap().is_empty());
    }

    #[test]
    fn io_error_names_the_path() {
        let dir = std::env::temp_dir().join(format!("cfmimo-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let blocker = dir.join("file");
        fs::write(&blocker, "x").unwrap();
        let err = emit_csv(&[], &blocker.join("nested.csv")).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
        let _ = fs::remove_dir_all(&dir);
    }
}
