use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use cfmimo_core::sim::{build_instance, evaluate_point, TrialInstance};
use cfmimo_core::{
    equal_power_load, exhaustive_schedule, gd_allocate, igss_schedule, mmse_weights, noise_variance, sum_rate_cf,
    ClusterProblem, CostLedger, GDConfig, GdProblem, Mode, RateContext, SimConfig,
};

const SNR_DB: f64 = 10.0;

fn small_config(mode: Mode) -> SimConfig {
    SimConfig {
        mode,
        m: 64,
        k: 16,
        n: 8,
        c: 4,
        ..SimConfig::default()
    }
}

/// Cluster 0 of a CLCF trial as a scheduling problem.
fn cluster_problem(config: &SimConfig, instance: &TrialInstance) -> ClusterProblem {
    let aps = &instance.cluster_aps[0];
    ClusterProblem {
        channels: instance.channels.block(aps, &instance.cluster_ues[0]),
        rho: config.symbol_power,
        noise_var: noise_variance(SNR_DB, config.m, config.symbol_power),
        power_budget: aps.len() as f64 * config.symbol_power,
    }
}

fn scheduling(c: &mut Criterion) {
    let config = small_config(Mode::Clcf);
    let instance = build_instance(&config, 0).unwrap();
    let problem = cluster_problem(&config, &instance);
    let n_c = config.n / config.c;
    let mut group = c.benchmark_group("scheduling");
    group.bench_function("igss", |b| {
        b.iter(|| igss_schedule(black_box(&problem), n_c, &[], &mut CostLedger::disabled()).unwrap())
    });
    group.bench_function("exhaustive", |b| {
        b.iter(|| exhaustive_schedule(black_box(&problem), n_c, &[], u128::MAX, &mut CostLedger::disabled()).unwrap())
    });
    group.finish();
}

fn power_allocation(c: &mut Criterion) {
    let config = small_config(Mode::Clcf);
    let instance = build_instance(&config, 0).unwrap();
    let problem = cluster_problem(&config, &instance);
    let users: Vec<usize> = (0..config.n / config.c).collect();
    let channels = problem.channels.columns(&users);
    let w = mmse_weights(&channels.hat, problem.noise_var, problem.power_budget, &mut CostLedger::disabled()).unwrap();
    let gd = GdProblem {
        w,
        channels,
        interferers: Vec::new(),
        rho: problem.rho,
        noise_var: problem.noise_var,
    };
    let d0 = equal_power_load(users.len(), problem.power_budget);
    let cfg = GDConfig::default();
    c.bench_function("gd_allocate", |b| {
        b.iter(|| gd_allocate(black_box(&gd), &cfg, &d0, problem.power_budget, &mut CostLedger::disabled()).unwrap())
    });
}

fn rate_evaluation(c: &mut Criterion) {
    let config = small_config(Mode::Cf);
    let instance = build_instance(&config, 0).unwrap();
    let aps: Vec<usize> = (0..config.m).collect();
    let ues: Vec<usize> = (0..config.n).collect();
    let block = instance.channels.block(&aps, &ues);
    let noise = noise_variance(SNR_DB, config.m, config.symbol_power);
    let budget = config.m as f64 * config.symbol_power;
    let precoder = mmse_weights(&block.hat, noise, budget, &mut CostLedger::disabled()).unwrap();
    let ctx = RateContext {
        rho: config.symbol_power,
        noise_var: noise,
        blocks: vec![vec![block]],
        precoders: vec![precoder],
    };
    c.bench_function("sum_rate_cf_64x8", |b| {
        b.iter(|| sum_rate_cf(black_box(&ctx), &mut CostLedger::disabled()).unwrap())
    });
}

fn trial_point(c: &mut Criterion) {
    let mut group = c.benchmark_group("trial_point");
    group.sample_size(10);
    for mode in [Mode::Clcf, Mode::Cf] {
        let config = small_config(mode);
        let instance = build_instance(&config, 0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(mode.label()), &instance, |b, inst| {
            b.iter(|| evaluate_point(&config, black_box(inst), SNR_DB).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, scheduling, power_allocation, rate_evaluation, trial_point);
criterion_main!(benches);
