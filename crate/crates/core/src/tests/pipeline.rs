//! End-to-end trial and sweep behavior.


use cfmimo_core::scheduling::SchedulerKind;
use cfmimo_core::sim::sweep::aggregate;
use cfmimo_core::sim::trial::build_instance;
use cfmimo_core::{noise_variance, run_sweep, run_trial, Complex64, Mode, PowerRule, SimConfig, TrialStatus};
use crate::oracle::*;

fn small_config() -> SimConfig {
    SimConfig {
        m: 16,
        k: 16,
        n: 8,
        trials: 2,
        snr_grid: vec![0.0, 10.0],
        ..SimConfig::default()
    }
}

/// MMSE weights from scratch: `G^* (G^T G^* + alpha I)^{-1}`, unit-norm columns.
fn oracle_mmse(g_hat: &Dense, alpha: f64) -> Dense {
    let n = g_hat[0].len();
    let gram = add(&mul(&transpose(g_hat), &conj(g_hat)), &scale(&identity(n), alpha));
    let mut w = mul(&conj(g_hat), &inverse(&gram));
    for j in 0..n {
        let norm = w.iter().map(|row| row[j].norm_sqr()).sum::<f64>().sqrt();
        for row in w.iter_mut() {
            row[j] /= norm;
        }
    }
    w
}

#[test]
fn same_trial_twice_is_identical() {
    let cfg = small_config();
    let a = run_trial(&cfg, 1).unwrap();
    let b = run_trial(&cfg, 1).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|r| r.status == TrialStatus::Ok));
}

#[test]
fn clcf_network_rate_is_sum_of_cluster_rates() {
    let cfg = small_config();
    for rec in run_trial(&cfg, 0).unwrap() {
        assert_eq!(rec.cluster_rates.len(), 4);
        let total: f64 = rec.cluster_rates.iter().sum();
        assert!((total - rec.sum_rate).abs() <= 1e-12 * rec.sum_rate.abs());
        assert!(rec.sum_rate >= 0.0);
        // the greedy first set may stop early, so clusters can schedule fewer than n_c
        assert!(rec.selected.iter().all(|s| !s.is_empty() && s.len() <= cfg.n / 4));
    }
}

#[test]
fn exhaustive_trial_equals_brute_force_over_all_subsets() {
    let cfg = SimConfig {
        mode: Mode::Cf,
        m: 8,
        k: 8,
        n: 4,
        trials: 1,
        snr_grid: vec![10.0],
        scheduler: SchedulerKind::Exhaustive,
        power_rule: PowerRule::Epl,
        ..SimConfig::default()
    };
    let rec = &run_trial(&cfg, 0).unwrap()[0];
    assert_eq!(rec.status, TrialStatus::Ok);

    let inst = build_instance(&cfg, 0).unwrap();
    let g_hat = from_cmat(&inst.channels.g_hat);
    let g_err = from_cmat(&inst.channels.g_err);
    let noise = noise_variance(10.0, cfg.m, cfg.symbol_power);
    let budget = cfg.m as f64 * cfg.symbol_power;
    let amp = (budget / cfg.n as f64).sqrt();
    let pick = |m: &Dense, set: &[usize]| -> Dense {
        m.iter().map(|row| set.iter().map(|&j| row[j]).collect()).collect()
    };
    let all = subsets(8, 4);
    assert_eq!(all.len(), 70);
    let (best_set, best_rate) = all
        .iter()
        .map(|set| {
            let gh = pick(&g_hat, set);
            let ge = pick(&g_err, set);
            let w = oracle_mmse(&gh, cfg.n as f64 * noise / budget);
            let p: Dense = w
                .iter()
                .map(|row| row.iter().map(|z| z * Complex64::from(amp)).collect())
                .collect();
            (set.clone(), cluster_rate_oracle(&gh, &ge, &p, &[], cfg.symbol_power, noise))
        })
        .fold((Vec::new(), f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    assert!(rel_err(rec.sum_rate, best_rate) < 1e-9, "{} vs {best_rate}", rec.sum_rate);
    assert_eq!(rec.selected, vec![best_set]);
}

#[test]
fn single_point_sweep_passes_the_record_through() {
    let cfg = SimConfig {
        trials: 1,
        snr_grid: vec![0.0],
        ..small_config()
    };
    let sweep = run_sweep(&cfg, 1).unwrap();
    assert_eq!(sweep.records.len(), 1);
    assert_eq!(sweep.aggregate.len(), 1);
    assert_eq!(sweep.aggregate[0].mean_rate, sweep.records[0].sum_rate);
    assert_eq!(sweep.aggregate[0].std_rate, 0.0);
    assert_eq!(sweep.aggregate[0].n_ok, 1);
}

#[test]
fn duplicated_records_average_to_the_single_value() {
    let cfg = SimConfig {
        trials: 1,
        snr_grid: vec![5.0],
        ..small_config()
    };
    let rec = run_trial(&cfg, 0).unwrap();
    let doubled: Vec<_> = rec.iter().chain(rec.iter()).cloned().collect();
    let agg = aggregate(&cfg.snr_grid, &doubled);
    assert_eq!(agg[0].mean_rate, rec[0].sum_rate);
    assert_eq!(agg[0].n_ok, 2);
}

#[test]
fn failed_records_are_excluded_and_counted() {
    let cfg = SimConfig {
        trials: 1,
        snr_grid: vec![0.0],
        ..small_config()
    };
    let mut recs = run_trial(&cfg, 0).unwrap();
    let mut bad = recs[0].clone();
    bad.status = TrialStatus::Failed;
    bad.sum_rate = f64::NAN;
    recs.push(bad);
    let agg = aggregate(&cfg.snr_grid, &recs);
    assert_eq!(agg[0].n_ok, 1);
    assert!(agg[0].mean_rate.is_finite());
}

#[test]
fn sweep_records_are_trial_major_and_worker_independent() {
    let cfg = SimConfig {
        trials: 3,
        ..small_config()
    };
    let one = run_sweep(&cfg, 1).unwrap();
    let three = run_sweep(&cfg, 3).unwrap();
    assert_eq!(one, three);
    let order: Vec<(usize, f64)> = one.records.iter().map(|r| (r.trial, r.snr_db)).collect();
    assert_eq!(order, vec![(0, 0.0), (0, 10.0), (1, 0.0), (1, 10.0), (2, 0.0), (2, 10.0)]);
    assert_eq!(one.failed, 0);
}

#[test]
fn counters_do_not_change_numerical_outputs() {
    let off = small_config();
    let on = SimConfig {
        counters: true,
        ..small_config()
    };
    let a = run_trial(&off, 0).unwrap();
    let b = run_trial(&on, 0).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.sum_rate.to_bits(), y.sum_rate.to_bits());
        assert_eq!(x.selected, y.selected);
        assert_eq!(x.flops, 0);
        assert!(y.flops > 0);
        assert_eq!(y.breakdown.total(), y.flops);
    }
}

#[test]
fn channels_are_shared_across_snr_points() {
    let cfg = small_config();
    let recs = run_trial(&cfg, 0).unwrap();
    assert!(recs.iter().all(|r| r.seed == recs[0].seed));
    let a = build_instance(&cfg, 0).unwrap();
    let b = build_instance(&cfg, 0).unwrap();
    assert_eq!(a.channels, b.channels);
}

#[test]
fn csv_record_roundtrips_to_twelve_digits() {
    use cfmimo_core::sim::output::{aggregate_path, parse_records_csv, RECORD_COLUMNS};
    let cfg = SimConfig {
        trials: 1,
        counters: true,
        ..small_config()
    };
    let recs = run_trial(&cfg, 0).unwrap();
    let dir = std::env::temp_dir().join(format!("cfmimo-csv-{}", std::process::id()));
    let path = dir.join("run.csv");
    cfmimo_core::emit_csv(&recs, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), RECORD_COLUMNS.join(","));
    let rows = parse_records_csv(&text).unwrap();
    assert_eq!(rows.len(), recs.len());
    for (row, rec) in rows.iter().zip(&recs) {
        assert_eq!(row.trial, rec.trial);
        assert_eq!(row.seed, rec.seed);
        assert!(rel_err(row.snr_db, rec.snr_db) < 1e-12 || row.snr_db == rec.snr_db);
        assert!(rel_err(row.sum_rate, rec.sum_rate) < 1e-12);
        assert_eq!(row.mode, "CLCF");
        assert_eq!(row.scheduler, "IGSS");
        assert_eq!(row.power_rule, "GD");
        assert_eq!(row.flops, rec.flops);
        assert_eq!(row.signaling, rec.signaling);
        assert_eq!(row.gd_iters, rec.gd_iters);
        assert_eq!(row.status, "ok");
    }
    let agg = std::fs::read_to_string(aggregate_path(&path)).unwrap();
    assert_eq!(agg.lines().next().unwrap(), "snr_db,mean_rate,std_rate,n_ok");
    assert_eq!(agg.lines().count(), 1 + cfg.snr_grid.len());
    let _ = std::fs::remove_dir_all(&dir);
}
